"""
Variational quantum classifiers on top of the encodings:

- hardware-efficient ansatz blocks and POVMs
- forward evaluation, BCE loss, parameter-shift gradients and training
- quantum kernels with kernel ridge regression
- the trainable linear front-end for high-dimensional inputs
- JSON checkpoints

"""
from .frontend import LinearFrontEnd, frontend_forward, frontend_spectral_norm
from .ansatz import BLOCK_KINDS, Ansatz
from .classifier import (ClassifierSpec, TrainConfig, parity_povm, qubit_povm, check_povm,
                         forward, forward_batch, predict, eta, bce_loss, output_gradient,
                         gradient, feature_gradient, input_gradient, train, noise_weights,
                         GRADIENT_MODES)
from .kernel import (SingularGramError, encoded_state, kernel, gram_matrix, kernel_train,
                     KernelRidge)
from .checkpoint import Checkpoint, save_checkpoint, load_checkpoint
