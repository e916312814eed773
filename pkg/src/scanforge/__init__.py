"""scanforge: RGB-D scan corpus tooling, staged-view rendering, MLLM-driven
caption/question annotation, human review, and point-mask benchmark scoring."""

__version__ = "0.1.0"
