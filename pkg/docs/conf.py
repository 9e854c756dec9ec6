# Configuration file for the Sphinx documentation builder.
#
# For the full list of built-in configuration values, see the documentation:
# https://www.sphinx-doc.org/en/master/usage/configuration.html

# -- Project information -----------------------------------------------------
# https://www.sphinx-doc.org/en/master/usage/configuration.html#project-information


import os
import sys

import talbotinv

from intersphinx_registry import get_intersphinx_mapping


project = 'talbotinv'
copyright = '2026, talbotinv contributors'
author = 'talbotinv contributors'
release = talbotinv.__version__

# -- General configuration ---------------------------------------------------
# https://www.sphinx-doc.org/en/master/usage/configuration.html#general-configuration

extensions = [
    # builtin
    "sphinx.ext.autodoc",
    "sphinx.ext.autosummary",
    "sphinx.ext.intersphinx",
    # contrib
    "numpydoc",
    "myst_parser",
    "sphinx_copybutton",
]

templates_path = ['_templates']
exclude_patterns = ['_build', 'Thumbs.db', '.DS_Store']



# -- Options for HTML output -------------------------------------------------
# https://www.sphinx-doc.org/en/master/usage/configuration.html#options-for-html-output

html_theme = 'pydata_sphinx_theme'
html_static_path = ['_static']
html_show_sourcelink = False


# Autodoc
sys.path.insert(0, os.path.abspath('../src'))


# Autosummary
autosummary_generate = True


# Numpydoc
numpydoc_attributes_as_param_list = True
numpydoc_class_members_toctree = False
numpydoc_xref_param_type = True
numpydoc_xref_aliases = {
    # Python
    "bool": ":ref:`bool <python:typebool>`",
    # talbotinv
    "CotangentContour": "talbotinv.contour.CotangentContour",
    "RationalContour": "talbotinv.contour.RationalContour",
    "NodeSet": "talbotinv.contour.NodeSet",
    "ScalarTransform": "talbotinv.quadrature.ScalarTransform",
    "VectorTransform": "talbotinv.quadrature.VectorTransform",
    "InversionResult": "talbotinv.quadrature.InversionResult",
    "RoundoffModel": "talbotinv.roundoff.RoundoffModel",
    "SaddleSolution": "talbotinv.params.SaddleSolution",
    "HeatModel": "talbotinv.problems.HeatModel",
    "SuiteEntry": "talbotinv.problems.SuiteEntry",
}
numpydoc_xref_ignore = {
    'type',
    'optional',
    'default',
    'or',
    'of',
    'shape',
    'n',
    'J',
    'dim',
}


# Intersphinx
intersphinx_mapping = get_intersphinx_mapping(packages={
    "numpy",
    "python",
    "scipy"
})
