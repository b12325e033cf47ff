"""The identity catalog: a static table of named checks run by ``verify-paper``."""

from __future__ import annotations

import fnmatch
import time
from dataclasses import dataclass
from math import gcd
from typing import Callable

from . import fm_engine as fm
from .ledger import (
    brute_force_solutions,
    canonical_ab,
    cyclic_product,
    det_chain_prop1A,
    solve_in_group,
)
from .mukai import (
    MukaiVector,
    chi_L_equals_ell,
    d_v,
    ogrady_tower,
    orthogonal_partner_m,
    verlinde_count,
    verlinde_data,
)
from .report import IdentityCheck, Report
from .theta_calc import (
    chain_44,
    exterior_shadow,
    genus_g_sections,
    pb_match,
    prop3_alpha_family,
    section_decomposition,
    symbol_identity,
    theta_group,
)
from .varieties import binomial, euler_char_line, genus_surface


def coprime_pairs(rmax=7, dmax=7):
    return [(r, d) for r in range(2, rmax + 1) for d in range(1, dmax + 1) if gcd(r, d) == 1]


def prop1A_params(rmax=6, dmax=5, ms=range(-2, 5), chis=range(-3, 2)):
    out = []
    for r, d in coprime_pairs(rmax, dmax):
        for m in ms:
            for chi in chis:
                if d * m - r * chi >= 1:
                    out.append((r, d, m, chi))
    return out


def orthogonal_shapes(ranks=range(1, 6), chis=range(-3, 1), ms=range(-3, 7)):
    """(r, m, chi, s, n, chi') with (r, sigma+m f, chi).(s, sigma+n f, chi') = 0."""
    out = []
    for r in ranks:
        for s in ranks:
            for chi in chis:
                for chi_p in chis:
                    for m in ms:
                        out.append((r, m, chi, s, orthogonal_partner_m(r, m, chi, s, chi_p), chi_p))
    return out


def _agg(id, description, ref, cases: list[tuple[object, object]]):
    """One check summarizing a sweep: lhs = #matching cases, rhs = #cases."""
    bad = [(a, b) for a, b in cases if a != b]
    chk = IdentityCheck.compare(id, description, ref, len(cases) - len(bad), len(cases))
    if bad:
        chk.note = f"first mismatch: {bad[0][0]} vs {bad[0][1]}"
    return chk


# -- check builders ----------------------------------------------------------------------


def det_rules():
    s = fm.SURFACE
    rs, rsd = [], []
    for a in range(-5, 6):
        for b in range(-5, 6):
            line = MukaiVector.from_ch(fm.exp(s.divisor(a, b)), s)
            t = fm.rs_vector(line)
            rs.append(((t.rank, t.sigma_f), (a * b, (-b, -a))))
            u = fm.rsdagger_vector(line)
            rsd.append(((u.rank, u.sigma_f), (a, (-1, a * b))))
    return [
        _agg("det-rules.rs", "RS of O(a sigma + b f): rank ab, c1 = -b sigma - a f", "determinant of the absolute transform", rs),
        _agg("det-rules.rsdagger", "RS-dagger of O(a sigma + b f): rank a, c1 = -sigma + ab f",
             "determinant of the fiberwise transform", rsd),
    ]


def mukai_inversion():
    K = fm.rs_kernel()
    cases = []
    for e in fm.basis(fm.X.ctx):
        twice = fm.transform_class(fm.transform_class(e, K).on(fm.X.ctx), K).on(fm.X.ctx)
        cases.append((twice, fm.minus_one_pullback(e)))
    return [_agg("mukai-inversion", "RS o RS = (-1)^* on all 16 basis classes", "inversion formula for the Poincare transform", cases)]


def inverse_kernels():
    return [
        IdentityCheck.compare("kernel-inverse.rs", "RS followed by its quasi-inverse has the diagonal kernel",
                              "kernel convolution", fm.convolve(fm.rs_kernel(), fm.rs_inverse_kernel()).effective.on(fm.PAIR.ctx) == fm.diagonal_X(), True),
        IdentityCheck.compare("kernel-inverse.rsdagger", "RS-dagger followed by its quasi-inverse has the diagonal kernel",
                              "kernel convolution", fm.convolve(fm.rsdagger_kernel(), fm.rsdagger_inverse_kernel()).effective.on(fm.PAIR.ctx) == fm.diagonal_X(), True),
    ]


def u_kernel_checks():
    chi_cases, int_cases = [], []
    for r, d in coprime_pairs(7, 7):
        a, b = canonical_ab(r, d)
        chi_cases.append((fm.chi_U(a, b, r, d), -d))
        ch = fm.u_class(a, b, r, d)
        int_cases.append((all(c.denominator == 1 for c in ch.terms.values()), True))
    return [
        _agg("u-kernel.chi", "chi(U) = -d for coprime r, d <= 7", "semihomogeneous kernel U", chi_cases),
        _agg("u-kernel.integral", "ch(U) = a exp(c1(U)/a) is integral", "semihomogeneous kernel U", int_cases),
    ]


def prop1A():
    out = []
    for r, d, m, chi in prop1A_params():
        out.extend(fm.prop1A_suite(r, d, m, chi))
    return out


def kernel_V():
    cases_rank, cases_c1, cases_push = [], [], []
    for r, d in coprime_pairs(6, 5):
        a, b = canonical_ab(r, d)
        k = fm.v_kernel_data(a, b, r, d)
        cases_rank.append((k.rank, b))
        cases_c1.append((k.c1, k.expected_c1))
        cases_push.append(((k.push_rank, k.push_det), (d, -r)))
    ref = "convolution of the dual U-kernel with P_F"
    return [
        _agg("kernel-V.rank", "V has rank b", ref, cases_rank),
        _agg("kernel-V.c1", "c1(V) = d[o x F] + a[F x o] + c1(P_F)", ref, cases_c1),
        _agg("kernel-V.push", "pushforward of V has rank d and determinant -r[o]", ref, cases_push),
    ]


def constraints():
    cases = []
    for r, d, m, chi in prop1A_params(ms=range(-1, 4), chis=range(-2, 1)):
        res = det_chain_prop1A(r, d, m, chi)
        sol = res.solution
        cases.append(((sol.unique, tuple(x.is_zero() for x in sol.particular)), (True, (True, True))))
    out = [_agg("constraints.det-chain", "determinant chains force a_B(Z) = 0 and mu = 0", "fixed-determinant constraints", cases)]
    # oracle agreement on a few small finite groups
    agree = []
    for mods in ([2, 4], [3, 9], [6], [2, 2, 2], [5, 5]):
        G = cyclic_product(mods)
        els = list(G.elements())
        for A in ([[2, 3], [1, -1]], [[1, 2], [0, -1]], [[2, 0], [0, 2]], [[3]]):
            rhs = [els[(7 * i + 1) % len(els)] for i in range(len(A))]
            sol = solve_in_group(A, rhs, G)
            agree.append((sol.enumerate(), brute_force_solutions(A, rhs, G)))
    out.append(_agg("constraints.oracle", "group solver agrees with brute force", "fixed-determinant constraints", agree))
    return out


def decorations():
    out = []
    plus, minus, chains, general = [], [], [], []
    for r in range(2, 6):
        for chi in range(-3, 1):
            for ell in range(1, 5):
                v = MukaiVector.of(r, 1, ell + r * chi, chi)  # m = d_v + r chi with d_v = ell
                dv = d_v(v)
                G = fm.decoration_group()
                p = fm.phi_action(v, "plus", G)
                plus.append((p.a_of_Z[0], G.gen("xB") * (-dv * r)))
                q = fm.phi_action(v, "minus", G)
                minus.append((q.a_of_Z[1], G.gen("yF") * (-chi * dv)))
                det = fm.minus_det_chain(v, G)
                chains.append(((det.ns, det.residual()), ((-v.m, -1), (G.zero(), G.zero()))))
                a, b = canonical_ab(r, 1)
                gq = fm.phi_action(v, "minus", G, general=True)
                general.append(((gq.decoration.xB, gq.decoration.xF, gq.residual),
                                (G.gen("yB"), G.gen("yF") * (a * chi + b * v.m), (G.gen("yB") * (-b * dv), G.gen("yF") * (-dv)))))
    ref = "translation and twist bookkeeping"
    out.append(_agg("decorations.plus", "a_B(Z+) = -d_v r x_B", ref, plus))
    out.append(_agg("decorations.minus", "a_F(Z-) = -chi d_v y_F", ref, minus))
    out.append(_agg("decorations.minus-det", "det RS(Phi^-(E, y)) = O(-f - m sigma) for all y", ref, chains))
    out.append(_agg("decorations.general", "general-degree isogeny f(z) = (d z_B, (a chi + b m) z_F)", ref, general))
    return out


def pb_checks():
    out = []
    cases = []
    for r, m, chi, s, n, chi_p in orthogonal_shapes():
        v = MukaiVector.of(r, 1, m, chi)
        w = MukaiVector.of(s, 1, n, chi_p)
        chk = pb_match(v, w)
        cases.append((chk.status, "pass"))
    out.append(_agg("pb-match", "rn + sm = (s-r) d_v - r^2(chi+chi') on orthogonal shapes", "theta bundle pullbacks", cases))
    return out


def alpha_checks():
    cases = []
    for r in range(1, 6):
        for s in range(1, 6):
            for chi in range(-3, 1):
                for chi_p in range(-3, 1):
                    fam = prop3_alpha_family(r, s, chi, chi_p)
                    cases.append(((fam.product == fam.expected, fam.c_exponent), (True, 0)))
    return [_agg("alpha-family", "four-term product = (r,1)^*L (x) O_B((s-r) o), c drops out", "test family for the theta bundle", cases)]


def theta_chain_checks():
    G = theta_group()
    Q = G.gen("Q")
    sym = [(symbol_identity(r), True) for r in range(1, 7)]
    shadow = [(exterior_shadow(r, g), 0) for g in (1, 2, 3) for r in range(1, 5)]
    red = []
    for r in range(1, 7):
        c = chain_44(r, Q)
        red.append((c.reduced.point, (G.gen("kappa") - Q * 2) * r))
    ref = "theta bundle on the higher-genus Hilbert scheme"
    return [
        _agg("theta-chain.symbol", "r^*Theta + Theta + 2r Theta - (r+1)^*Theta = r(Theta - Theta^-)", ref, sym),
        _agg("theta-chain.shadow", "(r,1)^*c1(P) + 2r Theta = 0 on A x A, g = 1, 2, 3", ref, shadow),
        _agg("theta-chain.alpha", "reduced chain = P_alpha^r with alpha = K_C(-2 gbar o) - 2Q", ref, red),
    ]


def verlinde_checks():
    cases, chiL, sec = [], [], []
    for r in (3, 4, 5):
        for chi in (-1, -2, -3):
            m = -r * chi  # m + n = -2 r chi with m = n
            v = MukaiVector.of(r, 1, m, chi)
            dv = d_v(v)
            data = verlinde_data(v, v)
            cases.append(((data.per_point, data.chi_L), (r * r, data.dsum * r * r)))
            chiL.append((chi_L_equals_ell(v, v).status, "pass"))
            sd = section_decomposition(v, v)
            sec.append(((sd.tau_count * binomial(2 * dv, dv), sd.per_tau_full), (verlinde_count(v, v), 1)))
    v0 = MukaiVector.of(3, 1, 3, -1)
    ref = "Verlinde-type count of theta sections"
    return [
        _agg("verlinde.per-point", "chi(L+)/(d_v+d_w) = r^2", ref, cases),
        _agg("verlinde.chi-L", "chi(O(2r sigma - (chi+chi') f)) = d_v + d_w", ref, chiL),
        _agg("verlinde.sections", "r^2 binom(d_v+d_w, d_v) = verlinde_count, one section per torsion point", ref, sec),
        IdentityCheck.compare("verlinde.instance", "v = w = (3, sigma+3f, -1)", ref, verlinde_count(v0, v0), 8316),
        IdentityCheck.compare("verlinde.minus-instance", "minus side for v = w = (3, sigma+3f, -1)", ref,
                              verlinde_count(v0, v0, "minus"), 924),
    ]


def tower_checks():
    cases = []
    for chi in range(-3, 1):
        for ell in range(1, 6):
            tower = ogrady_tower(chi, ell, 5)
            cases.append(([(t.twist(0, -chi).chi, d_v(t)) for t in tower], [(0, ell)] * 5))
    return [_agg("tower", "chi(v_k(-chi f)) = 0 and d_v(v_k) = ell along the tower", "inductive construction by extensions", cases)]


def genus_checks():
    out = []
    Q = theta_group().gen("Q")
    for g in (2, 3):
        s = genus_surface(g)
        for r in (3, 4):
            chi, chi_p, m = -g, -g, 1
            n = -r * chi_p - r * chi - m
            v = MukaiVector.of(r, 1, m, chi, s)
            w = MukaiVector.of(r, 1, n, chi_p, s)
            out.extend(genus_g_sections(v, w, Q))
    out.append(IdentityCheck.compare("genus-g.rr-instance", "chi(O(6 sigma + 5 f)) on the genus-2 surface", "Riemann-Roch on C x F",
                                     euler_char_line(genus_surface(2), 6, 5), 24))
    return out


@dataclass(frozen=True)
class CatalogEntry:
    id: str
    build: Callable[[], list[IdentityCheck]]


CATALOG: tuple[CatalogEntry, ...] = (
    CatalogEntry("det-rules", det_rules),
    CatalogEntry("mukai-inversion", mukai_inversion),
    CatalogEntry("kernel-inverse", inverse_kernels),
    CatalogEntry("u-kernel", u_kernel_checks),
    CatalogEntry("prop1A", prop1A),
    CatalogEntry("kernel-V", kernel_V),
    CatalogEntry("constraints", constraints),
    CatalogEntry("decorations", decorations),
    CatalogEntry("pb-match", pb_checks),
    CatalogEntry("alpha-family", alpha_checks),
    CatalogEntry("theta-chain", theta_chain_checks),
    CatalogEntry("verlinde", verlinde_checks),
    CatalogEntry("tower", tower_checks),
    CatalogEntry("genus-g", genus_checks),
)


def _matches(pattern: str | None, check_id: str, entry_id: str) -> bool:
    if not pattern:
        return True
    return fnmatch.fnmatchcase(check_id, pattern) or fnmatch.fnmatchcase(entry_id, pattern)


def _may_match(pattern: str | None, entry_id: str) -> bool:
    """Cheap pre-filter so a narrow --filter does not build unrelated checks."""
    if not pattern:
        return True
    head = pattern.split("*")[0].split("?")[0].split("[")[0]
    return fnmatch.fnmatchcase(entry_id, pattern) or head.startswith(entry_id) or entry_id.startswith(head)


def run_catalog(pattern: str | None = None, version: str = "0", models=None) -> Report:
    rep = Report(version, list(models or []))
    for entry in CATALOG:
        if not _may_match(pattern, entry.id):
            continue
        t0 = time.perf_counter()
        checks = entry.build()
        dt = (time.perf_counter() - t0) / max(1, len(checks))
        for c in checks:
            if _matches(pattern, c.id, entry.id):
                c.runtime = f"{dt:.4f}"
                rep.checks.append(c)
    return rep
