from extract.extraction import ExtractionMethod, ExtractionReport, extract, verify

__all__ = ["ExtractionMethod", "ExtractionReport", "extract", "verify"]
