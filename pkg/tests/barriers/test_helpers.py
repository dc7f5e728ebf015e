"""Helper methods for barrier tests."""

from rdlab.bounds.barriers import BarrierParams
from rdlab.model.geometry import Weight


class BarrierTestHelpers:
    """Helper class for barrier test functions."""

    M = 2.0
    P = 1.5

    @staticmethod
    def weight():
        return Weight("inverse_square")

    @staticmethod
    def euclidean_barrier(C=10.0, a=1.0, alpha=0.5, beta=0.75, T=256.0):
        return BarrierParams(C=C, a=a, alpha=alpha, beta=beta, T=T)

    @staticmethod
    def manifold_barrier(C=1.0, a=1.0, alpha=0.5, tau=1.0):
        return BarrierParams.from_alpha(C, a, alpha, tau, BarrierTestHelpers.M, target="manifold")
