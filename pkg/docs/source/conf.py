# Configuration file for the Sphinx documentation builder.
#
# https://www.sphinx-doc.org/en/master/usage/configuration.html

# -- Path setup --------------------------------------------------------------

import os, sys

sys.path.insert(0, os.path.abspath("../.."))
import spotmarket

# -- Project information -----------------------------------------------------

project = "spotmarket"
copyright = "2026, spotmarket contributors"
author = "spotmarket contributors"

version = spotmarket.__version__
release = version

# -- General configuration ---------------------------------------------------

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.ifconfig",
    "sphinx_autodoc_typehints",
]

#FIXME autodoc cannot resolve these
nitpick_ignore = [
    ('py:class', 'numpy.ndarray'),
    ('py:class', 'numpy.random._generator.Generator'),
    ('py:class', 'pandas.DataFrame'),
    ('py:class', 'pandas.core.frame.DataFrame'),
    ('py:data', 'typing.Callable'),
    ('py:data', 'typing.List'),
    ('py:data', 'typing.Optional'),
    ('py:data', 'typing.Tuple'),
]

set_type_checking_flag = True
always_document_param_types = True
typehints_document_rtype = True

templates_path = ["_templates"]
source_suffix = ".rst"
source_encoding = "utf-8-sig"
master_doc = "index"
language = None
exclude_patterns = ["_build", "Thumbs.db", ".DS_Store"]
pygments_style = "sphinx"
todo_include_todos = False

# -- Options for HTML output -------------------------------------------------

html_theme = "sphinx_rtd_theme"
html_static_path = []  # '_static'
html_show_sphinx = False
html_show_sourcelink = False
htmlhelp_basename = "spotmarketdoc"

# -- Options for LaTeX output ---------------------------------------------

latex_elements = {}
latex_documents = [
    (master_doc, "spotmarket.tex", u"spotmarket Documentation", author, "manual"),
]
latex_domain_indices = False

# -- Options for manual page output ---------------------------------------

man_pages = [(master_doc, "spotmarket", u"spotmarket Documentation", [author], 1)]

# -- Options for Epub output ----------------------------------------------

epub_title = project
epub_author = author
epub_publisher = author
epub_copyright = copyright
epub_exclude_files = ["search.html"]
