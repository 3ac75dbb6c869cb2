"""Acceptance gate: ten end-to-end criteria, one test and one summary line each.

Each test prints a single "criterion N ... PASS" line when its assertions
hold; tolerances are pinned in the assertions themselves.
"""

import math

import numpy as np
from scipy.constants import c as c_light

from qplate.media import SingleResonance, Tabulated, Vacuum, lossless
from qplate.quantum import (
    InputState,
    absorption_coefficient,
    one_side_illumination,
    output_commutator,
    output_correlation,
    output_photon_density,
    thermal_occupancy,
)
from qplate.scan import emit_csv, parse_config, run_scan
from qplate.slab import (
    SlabConfig,
    green_function,
    helmholtz_oracle,
    single_slab_matrices,
)
from qplate.stack import LayerStack, conservation_residuals, stack_matrices

OMEGA_REF = 1e15
UNIT_L = c_light / OMEGA_REF


def glass(beta, gamma=0.0):
    return Tabulated((OMEGA_REF * 1e-3, OMEGA_REF * 1e3),
                     (beta, beta), (gamma, gamma))


def random_resonant_medium(rng):
    w0 = rng.uniform(0.5, 2.0) * OMEGA_REF
    w1 = rng.uniform(0.1, 1.5) * w0
    g = rng.uniform(0.01, 0.3) * w0
    return SingleResonance(w0, w1, g)


def random_stack(rng, n_layers):
    layers = tuple(
        (random_resonant_medium(rng), rng.uniform(0.02, 0.5) * UNIT_L)
        for _ in range(n_layers))
    return LayerStack(Vacuum(), Vacuum(), layers)


def test_criterion_01_conservation_identities():
    rng = np.random.default_rng(20260823)
    worst = 0.0
    for _ in range(500):
        stack = random_stack(rng, int(rng.integers(1, 7)))
        omega = rng.uniform(0.2, 2.0) * OMEGA_REF
        M = stack_matrices(stack, omega)
        r1, r2, cross = conservation_residuals(M)
        worst = max(worst, abs(r1), abs(r2), cross)
    assert worst < 1e-9
    print(f"criterion 1 (conservation identities, 500 stacks): "
          f"PASS  max residual {worst:.3e}")


def test_criterion_02_lossless_unitarity():
    rng = np.random.default_rng(2)
    worst = 0.0
    for _ in range(50):
        stack = random_stack(rng, int(rng.integers(1, 7)))
        clamped = LayerStack(Vacuum(), Vacuum(),
                             tuple((lossless(m), l) for m, l in stack.layers))
        omega = rng.uniform(0.2, 2.0) * OMEGA_REF
        M = stack_matrices(clamped, omega)
        assert np.abs(M.A).max() == 0.0
        gram = M.T.conj().T @ M.T - np.eye(2)
        worst = max(worst, float(np.abs(gram).max()))
    assert worst < 1e-9
    print(f"criterion 2 (lossless unitarity): PASS  max |T+T - I| {worst:.3e}")


def test_criterion_03_green_function_oracle():
    rng = np.random.default_rng(3)
    worst_rel = 0.0
    worst_jump = 0.0
    for _ in range(10):
        cfg = SlabConfig(
            Vacuum(),
            glass(rng.uniform(1.2, 2.5), rng.uniform(0.05, 0.5)),
            Vacuum(),
            rng.uniform(0.2, 0.6) * UNIT_L,
        )
        sources = np.linspace(-2.0, 2.0, 50) * cfg.l
        # one oracle solve per source; 50 field nodes spread over the domain
        for xp in sources:
            xs, g = helmholtz_oracle(cfg, OMEGA_REF, xp)
            xp_snapped = xs[np.argmin(np.abs(xs - xp))]
            sel = np.linspace(0, xs.size - 1, 50).astype(int)
            exact = np.array(
                [green_function(cfg, OMEGA_REF, xs[j], xp_snapped) for j in sel])
            scale = np.abs(exact).max()
            worst_rel = max(worst_rel,
                            float(np.abs(g[sel] - exact).max() / scale))
        # derivative jump across the source from the closed form
        h = 1e-7 * cfg.l
        for xp in (-1.1 * cfg.l, 0.2 * cfg.l, 0.8 * cfg.l):
            def gr(x):
                return green_function(cfg, OMEGA_REF, x, xp)
            d_plus = (-3 * gr(xp) + 4 * gr(xp + h) - gr(xp + 2 * h)) / (2 * h)
            d_minus = (3 * gr(xp) - 4 * gr(xp - h) + gr(xp - 2 * h)) / (2 * h)
            worst_jump = max(worst_jump, abs((d_plus - d_minus) - 1.0))
    assert worst_rel < 1e-5
    assert worst_jump < 1e-3
    print(f"criterion 3 (Green function vs Helmholtz oracle): PASS  "
          f"max rel err {worst_rel:.3e}, jump err {worst_jump:.3e}")


def test_criterion_04_recursion_reproduces_single_slab():
    rng = np.random.default_rng(4)
    worst_T = 0.0
    worst_cov = 0.0
    for _ in range(100):
        med = random_resonant_medium(rng)
        l = rng.uniform(0.05, 0.5) * UNIT_L
        omega = rng.uniform(0.2, 2.0) * OMEGA_REF
        slab = single_slab_matrices(
            SlabConfig(Vacuum(), med, Vacuum(), l), omega)
        # the recursion must run at least one induction step, so the slab is
        # presented as two sublayers of the same medium
        split = rng.uniform(0.2, 0.8)
        stack = LayerStack(Vacuum(), Vacuum(),
                           ((med, split * l), (med, (1 - split) * l)))
        M = stack_matrices(stack, omega)
        worst_T = max(worst_T, float(np.abs(M.T - slab.T).max()))
        cov_diff = M.A @ M.A.conj().T - slab.A @ slab.A.conj().T
        worst_cov = max(worst_cov, float(np.abs(cov_diff).max()))
    assert worst_T < 1e-10
    assert worst_cov < 1e-10
    print(f"criterion 4 (recursion vs single slab, 100 configs): PASS  "
          f"max dT {worst_T:.3e}, max d(AA+) {worst_cov:.3e}")


def test_criterion_05_classical_fabry_perot():
    beta = 1.5
    med = glass(beta)
    r = (1.0 - beta) / (1.0 + beta)
    phases = np.linspace(0.3, 4.2 * math.pi, 1500)  # n2*omega*l/c samples
    trans = []
    worst = 0.0
    for delta_half in phases:
        l = delta_half * c_light / (beta * OMEGA_REF)
        M = single_slab_matrices(
            SlabConfig(Vacuum(), med, Vacuum(), l), OMEGA_REF)
        t = abs(M.T[1, 0]) ** 2
        expected = (1 - r * r) ** 2 / (
            1 + r ** 4 - 2 * r * r * math.cos(2 * delta_half))
        worst = max(worst, abs(t - expected))
        trans.append(t)
    assert worst < 1e-10
    trans = np.asarray(trans)
    step = phases[1] - phases[0]
    interior = np.flatnonzero(
        (trans[1:-1] > trans[:-2]) & (trans[1:-1] > trans[2:])) + 1
    assert interior.size >= 3
    for j in interior:
        m = round(phases[j] / math.pi)
        assert abs(phases[j] - m * math.pi) <= step
    print(f"criterion 5 (classical Fabry-Perot): PASS  "
          f"max |T21^2 - analytic| {worst:.3e}, "
          f"{interior.size} maxima at multiples of pi")


def test_criterion_06_thermal_radiator():
    stack = LayerStack(Vacuum(), Vacuum(),
                       ((glass(1.7, 0.3), 0.4 * UNIT_L),
                        (glass(1.3, 0.15), 0.3 * UNIT_L)))
    temp = 3000.0
    worst_rad = worst_bb = worst_one = 0.0
    for w in np.linspace(0.3, 1.8, 25) * OMEGA_REF:
        M = stack_matrices(stack, w)
        dens = 1.0 / (2 * math.pi * c_light) * thermal_occupancy(w, temp)
        out = output_photon_density(M, InputState.thermal_plate(w, temp))
        for i in (1, 2):
            worst_rad = max(worst_rad, abs(
                out[i - 1] - absorption_coefficient(M, i) * dens))
        bb = output_photon_density(M, InputState.blackbody(w, temp))
        worst_bb = max(worst_bb, abs(bb[0] - dens), abs(bb[1] - dens))
        n_in = 1.0
        o1, o2 = one_side_illumination(M, n_in)
        deficit = n_in - o1 - o2
        worst_one = max(worst_one, abs(
            deficit - absorption_coefficient(M, 1) * n_in))
    assert worst_rad < 1e-10
    assert worst_bb < 1e-9
    assert worst_one < 1e-10
    print(f"criterion 6 (thermal radiator / blackbody / one-side): PASS  "
          f"residuals {worst_rad:.3e}, {worst_bb:.3e}, {worst_one:.3e}")


def test_criterion_07_commutator_suite():
    # transparent surroundings: same-side kernels unity, cross kernel zero
    stack = LayerStack(Vacuum(), Vacuum(),
                       ((glass(1.8, 0.25), 0.5 * UNIT_L),))
    M = stack_matrices(stack, OMEGA_REF)
    x_l, x_r = stack.boundaries()[0], stack.boundaries()[-1]
    worst = 0.0
    for d1, d2 in [(0.3, 0.3), (0.5, 2.0), (4.0, 0.1)]:
        left = output_commutator("left", x_l - d1 * UNIT_L, x_l - d2 * UNIT_L,
                                 OMEGA_REF, M, stack)
        right = output_commutator("right", x_r + d1 * UNIT_L, x_r + d2 * UNIT_L,
                                  OMEGA_REF, M, stack)
        cross = output_commutator("cross", x_r + d1 * UNIT_L, x_l - d2 * UNIT_L,
                                  OMEGA_REF, M, stack)
        worst = max(worst, abs(left - 1.0), abs(right - 1.0), abs(cross))
    assert worst < 1e-9

    # weakly lossy surround: the deviation from the bulk kernel must fall
    # off with distance; sampling at the phase period isolates the envelope
    outer = glass(1.4, 0.02)
    stack2 = LayerStack(outer, Vacuum(), ((glass(1.8, 0.25), 0.5 * UNIT_L),))
    M2 = stack_matrices(stack2, OMEGA_REF)
    x_l2 = stack2.boundaries()[0]
    k = OMEGA_REF / c_light
    period = math.pi / (1.4 * k)
    devs = []
    for j in range(1, 7):
        x = x_l2 - j * period
        val = output_commutator("left", x, x, OMEGA_REF, M2, stack2)
        devs.append(abs(val - 1.0))
    assert devs[0] > 0.0
    assert all(a > b for a, b in zip(devs, devs[1:]))
    print(f"criterion 7 (commutator suite): PASS  "
          f"transparent residual {worst:.3e}, lossy deviation decays "
          f"{devs[0]:.3e} -> {devs[-1]:.3e}")


FIG_SCAN_TOML = """
[media.vac]
kind = "vacuum"

[media.res]
kind = "single_resonance"
omega0 = 1.0
omega1 = 1.0
damping = 0.1

[stack]
left = "vac"
right = "vac"
layers = [["res", "sweep"]]

[frequency]
start = 0.2
stop = 2.0
count = 181

[thickness]
start = 0.1
stop = 30.0
count = 300

[run]
scenario = "one_side"
output = "fig_scan.csv"
"""


def _fig_scan_rows():
    cfg = parse_config(FIG_SCAN_TOML.encode())
    return cfg, run_scan(cfg)


def test_criterion_08_resonance_surface():
    cfg, rows = _fig_scan_rows()
    freqs = np.array(cfg.freq_grid)
    thicks = np.array(cfg.thickness_grid)
    nf = freqs.size
    n2 = np.array([r.n2 for r in rows]).reshape(thicks.size, nf)
    n1 = np.array([r.n1 for r in rows]).reshape(thicks.size, nf)
    na = np.array([r.na for r in rows]).reshape(thicks.size, nf)

    j_res = int(np.argmin(np.abs(freqs - 1.0)))
    j_low = int(np.argmin(np.abs(freqs - 0.2)))
    j_osc = int(np.argmin(np.abs(freqs - 0.3)))
    i_l10 = int(np.argmin(np.abs(thicks - 10.0)))

    # mirror regime: a thick plate transmits nothing on resonance
    assert n2[i_l10, j_res] < 1e-3
    # and reflects more strongly than far below resonance
    assert n1[i_l10, j_res] > n1[i_l10, j_low]
    # absorption peaks inside the resonance band
    peak_freq = freqs[int(np.argmax(na[i_l10]))]
    assert 0.7 <= peak_freq <= 1.5
    # etalon regime: transmission oscillates along thickness at low frequency
    col = n2[:, j_osc]
    d = np.sign(np.diff(col))
    extrema = int(np.count_nonzero(d[1:] * d[:-1] < 0))
    assert extrema >= 3
    print(f"criterion 8 (resonance surface): PASS  "
          f"N2(res, l=10) {n2[i_l10, j_res]:.3e}, absorption peak at "
          f"{peak_freq:.2f} w0, {extrema} thickness extrema at 0.3 w0")


def _wick_photon_oracle(states):
    """Wick expansion for a Gaussian, frequency-diagonal photon input.

    Pair moments <a_i^+(w) a_j(w)> come from the InputState at w; higher
    moments are sums over all pairings of creation with destruction slots.
    """
    def pair(ci, wi, dj, wj):
        if wi != wj:
            return 0.0
        s = states(wi)
        mat = {(1, 1): s.n_ph1, (2, 2): s.n_ph2,
               (1, 2): s.x_ph, (2, 1): np.conj(s.x_ph)}
        return mat[(ci, dj)]

    def corr(create, destroy):
        if len(create) != len(destroy):
            return 0.0
        if not create:
            return 1.0
        (c0, w0) = create[0]
        total = 0.0
        for j, (dj, wj) in enumerate(destroy):
            p = pair(c0, w0, dj, wj)
            if p != 0.0:
                total += p * corr(create[1:], destroy[:j] + destroy[j + 1:])
        return total
    return corr


def _brute_force_order22(indices, frequencies, mats, photon_corr, temp, length):
    """Independent expansion of a (2, 2) output correlation.

    Every slot is opened into (excitation kind, internal channel) by four
    explicit nested loops per axis; photon moments come from the shared
    input oracle and matter moments are recomputed here from scratch.
    """
    dens = length / (2 * math.pi * c_light)

    def matter_moment(create, destroy):
        # create/destroy are lists of (channel, frequency)
        if len(create) != len(destroy):
            return 0.0
        if not create:
            return 1.0
        cs = sorted(create, key=lambda t: t[1])
        ds = sorted(destroy, key=lambda t: t[1])
        for a, b in zip(cs, cs[1:]):
            if a[1] == b[1]:
                return 0.0
        val = 1.0
        for (ci, wi), (dj, wj) in zip(cs, ds):
            if ci != dj or wi != wj:
                return 0.0
            if temp <= 0:
                return 0.0
            val *= dens / math.expm1(
                1.0545718176461565e-34 * wi / (1.380649e-23 * temp))
        return val

    total = 0.0 + 0.0j
    for k0 in (0, 1):
        for k1 in (0, 1):
            for k2 in (0, 1):
                for k3 in (0, 1):
                    kinds = (k0, k1, k2, k3)
                    for c0 in (1, 2):
                        for c1 in (1, 2):
                            for c2 in (1, 2):
                                for c3 in (1, 2):
                                    chans = (c0, c1, c2, c3)
                                    amp = 1.0 + 0.0j
                                    ph_c, ph_d, dp_c, dp_d = [], [], [], []
                                    for slot in range(4):
                                        Mw = mats(frequencies[slot])
                                        src = Mw.T if kinds[slot] == 0 else Mw.A
                                        entry = src[indices[slot] - 1,
                                                    chans[slot] - 1]
                                        item = (chans[slot], frequencies[slot])
                                        if slot < 2:
                                            amp *= np.conj(entry)
                                            (ph_c if kinds[slot] == 0
                                             else dp_c).append(item)
                                        else:
                                            amp *= entry
                                            (ph_d if kinds[slot] == 0
                                             else dp_d).append(item)
                                    total += (amp
                                              * photon_corr(ph_c, ph_d)
                                              * matter_moment(dp_c, dp_d))
    return total


def test_criterion_09_correlation_cross_checks():
    rng = np.random.default_rng(9)
    worst_11 = 0.0
    for _ in range(1000):
        stack = random_stack(rng, int(rng.integers(1, 4)))
        omega = rng.uniform(0.2, 2.0) * OMEGA_REF
        M = stack_matrices(stack, omega)
        temp = rng.uniform(500.0, 5000.0)
        n_dp = 1.0 / (2 * math.pi * c_light) * thermal_occupancy(omega, temp)
        n1, n2 = rng.uniform(0.0, 3.0, 2)
        x = rng.uniform(0, 1) * math.sqrt(n1 * n2) * np.exp(
            1j * rng.uniform(0, 2 * math.pi))
        s = InputState(n_ph1=n1, n_ph2=n2, x_ph=complex(x),
                       n_dp1=n_dp, n_dp2=n_dp, temperature=temp)
        oracle = _wick_photon_oracle(lambda w: s)
        expected = output_photon_density(M, s)
        for i in (1, 2):
            val = output_correlation(1, 1, [i, i], [omega, omega],
                                     lambda w: M, oracle, temp)
            scale = max(1.0, abs(expected[i - 1]))
            worst_11 = max(worst_11, abs(val - expected[i - 1]) / scale)
    assert worst_11 < 1e-10

    worst_22 = 0.0
    for case in range(20):
        stack = random_stack(rng, int(rng.integers(1, 4)))
        w_a = rng.uniform(0.3, 1.0) * OMEGA_REF
        w_b = rng.uniform(1.1, 2.0) * OMEGA_REF
        pattern = [(w_a, w_a, w_a, w_a),
                   (w_a, w_b, w_b, w_a),
                   (w_a, w_b, w_a, w_b)][case % 3]
        idx = [int(rng.integers(1, 3)) for _ in range(4)]
        temp = rng.uniform(2000.0, 8000.0)
        mats = {}
        # order-one densities: quantization length 2*pi*c makes the
        # per-delta density factor exactly the thermal occupancy
        length = 2 * math.pi * c_light

        def matrices(w, _stack=stack, _mats=mats):
            if w not in _mats:
                _mats[w] = stack_matrices(_stack, w)
            return _mats[w]

        def state(w, _temp=temp):
            # unequal photon densities: equal ones make cross-channel
            # output moments cancel exactly by row orthogonality
            n = thermal_occupancy(w, _temp)
            return InputState(n_ph1=n, n_ph2=0.4 + 2.0 * n, n_dp1=n, n_dp2=n,
                              temperature=_temp, length=length)

        oracle = _wick_photon_oracle(state)
        got = output_correlation(2, 2, idx, list(pattern), matrices,
                                 oracle, temp, length=length)
        want = _brute_force_order22(idx, list(pattern), matrices, oracle,
                                    temp, length)
        assert abs(want) > 0.0
        worst_22 = max(worst_22, abs(got - want) / abs(want))
    assert worst_22 < 1e-10
    print(f"criterion 9 (correlation cross-checks): PASS  "
          f"(1,1) dev {worst_11:.3e}, (2,2) dev {worst_22:.3e}")


def test_criterion_10_deterministic_scan(tmp_path):
    cfg = parse_config(FIG_SCAN_TOML.encode())
    outputs = []
    for run, threads in ((0, 1), (1, 1), (2, 1), (3, 4)):
        path = tmp_path / f"scan_{run}.csv"
        emit_csv(run_scan(cfg, threads=threads), path)
        outputs.append(path.read_bytes())
    assert all(b == outputs[0] for b in outputs[1:])
    print(f"criterion 10 (determinism): PASS  4 runs byte-identical "
          f"({len(outputs[0])} bytes, thread counts 1 and 4)")
