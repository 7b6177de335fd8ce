"""Switch count diagnostics of Boolean functions under p-biased dynamics."""
__version__ = "0.1.0"
