"""
Datasets for the experiments:

- TwoMoons and the Annular ground truth
- IDX files and the balanced two-digit MNIST subset
- seeded train/test splits

"""
from .datasets import SPLITS, Dataset, two_moons, annular, annular_label, split
from .idx import IDXFormatError, IMAGE_MAGIC, LABEL_MAGIC, read_idx, write_idx, mnist_binary
