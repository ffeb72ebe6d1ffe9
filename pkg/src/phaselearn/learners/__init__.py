from phaselearn.learners.binary import learn_binary, learn_sparse
from phaselearn.learners.generalized import (
    identify_derivative,
    learn_generalized,
    learn_stabilizer,
    stabilizer_equivalent,
)
from phaselearn.learners.noisy import (
    LPNTie,
    graph_degree,
    learn_local_noise_quadratic,
    learn_noisy_quadratic,
    lpn_decode,
)
from phaselearn.learners.report import LearnReport

__all__ = [
    "LearnReport",
    "learn_binary",
    "learn_sparse",
    "learn_generalized",
    "learn_stabilizer",
    "identify_derivative",
    "stabilizer_equivalent",
    "lpn_decode",
    "LPNTie",
    "graph_degree",
    "learn_noisy_quadratic",
    "learn_local_noise_quadratic",
]
