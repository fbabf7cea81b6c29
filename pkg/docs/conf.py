# Sphinx configuration for the Fusion Lab developer documentation.
#
# Pages are written in Markdown (via recommonmark); the API page pulls
# docstrings out of the fusionlab package with autodoc.
import os
import sys
sys.path.insert(0, os.path.abspath('..'))

from recommonmark.transform import AutoStructify
import fusionlab


project = 'Fusion Lab'
copyright = '2020, Nicholas H.Tollervey'
author = 'Nicholas H.Tollervey'
release = fusionlab.__version__

source_suffix = ".md"
master_doc = "index"
extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.viewcode',
    "recommonmark",
]
exclude_patterns = ['_build', 'Thumbs.db', '.DS_Store']

# autodoc imports every module; keep the import time logging quiet.
os.environ.setdefault("FUSIONLAB_LOG_LEVEL", "ERROR")

html_theme = 'alabaster'
html_theme_options = {
    'description': 'Exact analysis of fusion tiling rules.',
    'logo_name': True,
    'github_user': 'ntoll',
    'github_repo': 'fusion-lab',
}
html_sidebars = {
    '**': ['about.html', 'navigation.html', 'searchbox.html'],
}
pygments_style = "sphinx"

github_doc_root = 'https://github.com/ntoll/fusion-lab/tree/master/docs/'


def setup(app):
    app.add_config_value('recommonmark_config', {
            'url_resolver': lambda url: github_doc_root + url,
            'auto_toc_tree_section': 'Contents',
            }, True)
    app.add_transform(AutoStructify)
