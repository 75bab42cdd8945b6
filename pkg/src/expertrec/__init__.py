"""Expert recommendation from curriculum text.

Pipeline: curriculum records -> stemmed radicals -> TF-IDF specialist matrix
-> autoencoder (numpy, trained from scratch) -> 20-dim embedding index ->
cosine ranking of free-text queries, plus a 3-D PCA export for plotting.
"""

__version__ = "0.1.0"
