"""Time-varying PACF estimation and inference for locally stationary time series."""

__version__ = "0.1.0"
