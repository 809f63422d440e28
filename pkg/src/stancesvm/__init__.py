"""SVM-based stance detection on Turkish sports tweets.

Submodules:

- ``corpus``: stance-annotated data sets and inter-annotator agreement
- ``text``: tweet tokenization, Turkish case folding, flags
- ``features``: vocabularies and sparse binary feature vectors
- ``ner``: gazetteer-driven named entity recognition and exact-match scoring
- ``svm``: linear soft-margin SVM trained by SMO
- ``evaluation``: stratified k-fold cross-validation and metric tables
- ``cli``: command-line entry point
"""

__version__ = "0.1.0"
