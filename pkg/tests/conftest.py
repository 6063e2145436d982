import pytest

from passivekey import ChannelModel, SecurityBudget, SourceModel


@pytest.fixture(scope="session")
def src():
    """Reference SPDC source: mu = 0.5, eta_A = 0.5, d_A = 1e-6."""
    return SourceModel(mu=0.5, eta_A=0.5, d_A=1e-6)


@pytest.fixture(scope="session")
def sec():
    return SecurityBudget(eps_sec=1e-10, eps_cor=1e-12, f_EC=1.16)


@pytest.fixture(scope="session")
def channel_50km():
    return ChannelModel(alpha_db_per_km=0.20, L_km=50.0, eta_B=0.1,
                        p_d=6e-7, e_d=0.005)


def make_channel(L_km: float) -> ChannelModel:
    return ChannelModel(alpha_db_per_km=0.20, L_km=L_km, eta_B=0.1,
                        p_d=6e-7, e_d=0.005)
