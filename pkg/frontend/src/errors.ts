export class ExporterError extends Error {}

export class ModelLoadError extends ExporterError {}

export class ShapeMismatch extends ExporterError {}

export class DatasetMissing extends ExporterError {}
