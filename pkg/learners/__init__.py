from .naive_bayes import NaiveBayesModel
from .hoeffding_tree import HoeffdingTree, LeafNode, SplitNode, hoeffding_bound

__all__ = ["NaiveBayesModel", "HoeffdingTree", "LeafNode", "SplitNode", "hoeffding_bound"]
