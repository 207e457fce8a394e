#!/usr/bin/env python3
# -*- coding: utf-8 -*-

import os
import sys

import sphinx_rtd_theme

sys.path.insert(0, os.path.abspath(".."))  # noqa: F402

from ramimo import __version__  # noqa: E402

# -- General configuration ------------------------------------------------
extensions = ["sphinx.ext.autodoc", "sphinx.ext.mathjax"]

# Add any paths that contain templates here, relative to this directory.
templates_path = ["_templates"]

# The suffix of source filenames.
source_suffix = ".rst"

# The master toctree document.
master_doc = "index"

# General information about the project.
project = "ramimo"
copyright = "2024, The ramimo developers"

# The short X.Y version.
version = ".".join(__version__.split(".")[:2])
# The full version, including alpha/beta/rc tags.
release = __version__

# List of patterns, relative to source directory, that match files and
# directories to ignore when looking for source files.
exclude_patterns = ["_build"]

# The name of the Pygments (syntax highlighting) style to use.
pygments_style = "sphinx"



# -- Options for HTML output ----------------------------------------------

# Set the html_theme when building locally
html_theme = "sphinx_rtd_theme"
html_theme_path = [sphinx_rtd_theme.get_html_theme_path()]

# Output file base name for HTML help builder.
htmlhelp_basename = "ramimodoc"


# -- Options for LaTeX output ---------------------------------------------

latex_elements = {}

latex_documents = [
    ("index", "ramimo.tex", "ramimo Documentation", "The ramimo developers", "manual"),
]


# -- Options for manual page output ---------------------------------------

man_pages = [("index", "ramimo", "ramimo Documentation", ["The ramimo developers"], 1)]
