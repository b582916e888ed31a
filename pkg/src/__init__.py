# irsperf - Spectral and energy efficiency of IRS-assisted MISO links with hardware impairments
__version__ = "0.3.0"
