"""Desk-scale FMCW SAR toolkit: leakage simulation, A-SPC synthesis and image quality metrics."""
import logging

from .__version__ import __version__  # noqa: F401

logger = logging.getLogger(__name__)
