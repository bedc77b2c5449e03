# -*- coding: utf-8 -*-
#
import io
import os
import re
import sys

# sbp-induction documentation build configuration file.
#
# This file is execfile()d with the current directory set to its
# containing dir.

sys.path.insert(0, os.path.abspath(".."))
sys.path.append(os.path.join(os.path.dirname(__file__), "_themes"))

# -- General configuration ------------------------------------------------

extensions = [
    "pallets_sphinx_themes",
    "sphinx.ext.autodoc",
    "sphinx.ext.intersphinx",
    "sphinx.ext.mathjax",
    "sphinx.ext.viewcode",
    "sphinx.ext.autosectionlabel",
]

templates_path = ["_templates"]

source_suffix = ".rst"

master_doc = "index"

project = "sbp-induction"
author = "sbp-induction contributors"

# The short X.Y version and the full version, read from the package.
with io.open("../sbp_induction/__init__.py", encoding="utf-8") as f:
    package_version = re.search(r"__version__ = \"(.+)\"", f.read()).group(1)
version = package_version
release = package_version

language = "en"

exclude_patterns = []

todo_include_todos = False

intersphinx_mapping = {
    "python": ("https://docs.python.org/3", None),
    "numpy": ("https://numpy.org/doc/stable/", None),
    "flask": ("https://flask.palletsprojects.com/en/latest/", None),
    "click": ("https://click.palletsprojects.com/en/latest/", None),
}

# -- Options for HTML output ----------------------------------------------

html_theme = "flask"
html_theme_path = ["_themes"]

htmlhelp_basename = "sbp-inductiondoc"

# -- Options for LaTeX output ---------------------------------------------

latex_elements = {}

latex_documents = [
    (
        master_doc,
        "sbp-induction.tex",
        "sbp-induction Documentation",
        author,
        "manual",
    )
]

# -- Options for manual page output ---------------------------------------

man_pages = [(master_doc, "sbp-induction", "sbp-induction Documentation", [author], 1)]

# -- Options for Texinfo output -------------------------------------------

texinfo_documents = [
    (
        master_doc,
        "sbp-induction",
        "sbp-induction Documentation",
        author,
        "sbp-induction",
        "Summation-by-parts solver for the magnetic induction equation.",
        "Miscellaneous",
    )
]

nitpick_ignore = [
    ("py:class", "flask.config.Config"),
    ("py:class", "numpy.ndarray"),
]
