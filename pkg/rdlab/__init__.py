"""rdlab: slow-diffusion reaction simulator and estimate verification lab."""

__version__ = "0.1.0"
