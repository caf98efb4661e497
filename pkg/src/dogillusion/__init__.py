"""Multiscale DoG edge maps and Hough tilt analysis of geometric illusions."""
from .dogfilter import DoGSpec, EdgeMapStack, dog_filter, dog_kernel_2d, edge_map, gaussian_kernel_1d, scale_schedule
from .houghtilt import HoughParams, LineSegment, TiltStats, analyze_edge_map, tilt_statistics
from .imagecore import binarize, load_image, render_jetwhite, save_grayscale

__version__ = "0.1.0"
