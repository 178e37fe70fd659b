import logging

import numpy as np
from numpy.testing import assert_allclose
import pytest

import kinetics
from kinetics import hill_act, hill_inh
from kinetics.core import clamp_nonnegative
from kinetics.limb_bud import LimbBudNetwork
from kinetics.linear import LinearDecayNetwork
from mesh import Mesh
from utils import KineticsError


def test_registry():
    assert 'limb_bud' in kinetics.NETWORK_REGISTRY
    assert 'linear_decay' in kinetics.NETWORK_REGISTRY
    assert kinetics.NETWORK_REGISTRY['limb_bud'] is LimbBudNetwork


def test_hill_examples():
    assert hill_act(0.2, 0.2) == 0.5
    assert hill_inh(0.125, 0.125) == 0.5
    assert hill_act(0., 0.5) == 0.
    assert hill_inh(0., 0.5) == 1.
    assert_allclose(hill_act(1., 0.5), 0.8)


def test_hill_terms_sum_to_one():
    rng = np.random.RandomState(17)
    x = rng.uniform(0., 10., 10000)
    K = rng.uniform(1e-3, 5., 10000)
    assert_allclose(hill_act(x, K) + hill_inh(x, K), 1., atol=1e-14)


def test_default_parameters():
    net = LimbBudNetwork()
    r = net.rates_params
    assert_allclose([r.D_diff, r.rho_A, r.rho_B, r.rho_C, r.d_A],
                    [3600., 0.36, 18., 72., 3.6e-3])
    assert (net.hill.K_BA, net.hill.K_AB, net.hill.K_CB, net.hill.K_AC) \
        == (0.2, 0.125, 0.5, 0.025)
    assert net.diffusion('B') == 3600.
    assert_allclose(net.degradation('C'), 3.6e-3)


def test_parameter_overrides():
    net = LimbBudNetwork({'T': 7200., 'rho_A': 1., 'D_C': 10.})
    assert net.diffusion('A') == 7200.
    assert net.diffusion('C') == 10.
    assert net.rates_params.rho_A == 1.
    assert_allclose(net.rates_params.rho_B, 36.)


def test_parameter_errors():
    with pytest.raises(KineticsError):
        LimbBudNetwork({'rho_X': 1.})
    with pytest.raises(KineticsError):
        LimbBudNetwork({'K_AB': 0.})
    with pytest.raises(KineticsError):
        LimbBudNetwork({'d_B': -1.})
    with pytest.raises(KineticsError):
        LinearDecayNetwork({'D': -1.})


def test_reaction_rates_at_rest():
    net = LimbBudNetwork()
    assert_allclose(net.reaction_rates(0., 0., 0., 'domain1'),
                    (0.36, 0., 0.))
    assert net.reaction_rates(0., 0., 0., 'domain2') == (0., 0., 0.)


def test_reaction_rates_in_domain3():
    net = LimbBudNetwork()
    rates = net.reaction_rates(1., 0., 0., 'domain3')
    assert_allclose(rates, (-3.6e-3, 18. / 1.015625 - 0.,
                            72. / 1.000625), rtol=1e-12)
    rates = net.reaction_rates(1., 0.5, 0.5, 'domain1')
    assert_allclose(rates, (0.36 * 0.04 / 0.29 - 3.6e-3,
                            18. / 1.015625 * 0.5 - 1.8e-3, -1.8e-3),
                    rtol=1e-12)


def test_production_is_local():
    net = LimbBudNetwork()
    rng = np.random.RandomState(3)
    for _ in range(100):
        A, B, C = rng.uniform(0., 2., 3)
        for label in ('domain2', 'domain3'):
            assert net.effective_production(A, B, C, label)[0] == 0.
        for label in ('domain1', 'domain2'):
            assert net.effective_production(A, B, C, label)[2] == 0.
        assert net.effective_production(A, B, C, 'domain1')[0] > 0.


def test_unknown_label():
    net = LimbBudNetwork()
    with pytest.raises(KineticsError):
        net.reaction_rates(1., 0., 0., 'domain9')
    loose = LinearDecayNetwork()
    loose.production({'C': np.ones(3)}, np.array(['anything'] * 3))
    loose.bind(['a', 'b'])
    with pytest.raises(KineticsError):
        loose.production({'C': np.ones(3)}, np.array(['a', 'b', 'c']))


def test_bind_checks_production_regions():
    net = LimbBudNetwork()
    with pytest.raises(KineticsError):
        net.bind(['domain1', 'domain2'])
    net.bind(['domain3', 'domain1', 'domain2', 'domain4'])
    assert net.subdomain_ids == ['domain3', 'domain1', 'domain2', 'domain4']


def test_negative_concentrations_are_clamped(caplog):
    caplog.set_level(logging.WARNING)
    assert_allclose(clamp_nonnegative([-1e-3, 2.], 'A'), [0., 2.])
    assert "Clamping" in caplog.text
    net = LimbBudNetwork()
    assert net.effective_production(-0.5, 0., 0., 'domain3') == (0., 0., 0.)


def test_initial_conditions_patch_fraction():
    m = Mesh([(0, 0), (1, 0), (1, 1), (0, 1)], [(0, 1, 2), (0, 2, 3)],
             [0, 1], ['domain1', 'domain3'])
    init = LimbBudNetwork().initial_conditions(m)
    assert_allclose(init['A'], [0.5, 0., 0.5, 1.])
    assert np.all(init['B'] == 0.) and np.all(init['C'] == 0.)


def test_linear_decay_initial_conditions():
    m = Mesh([(0, 0), (1, 0), (1, 1), (0, 1)], [(0, 1, 2), (0, 2, 3)])
    net = LinearDecayNetwork({'c0': 2.5})
    assert_allclose(net.initial_conditions(m)['C'], 2.5)
    net.set_initial(lambda x, y: x + 2. * y)
    assert_allclose(net.initial_conditions(m)['C'], [0., 1., 3., 2.])
    assert net.rates({'C': np.ones(4)}, np.array(['domain'] * 4))['C'][0] \
        == 0.


def test_describe():
    assert LimbBudNetwork().describe().startswith('limb_bud: D=3600')
    assert LinearDecayNetwork({'d': 0.5}).describe() == \
        'linear_decay: D=1 d=0.5'
