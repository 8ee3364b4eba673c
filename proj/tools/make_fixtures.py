#!/usr/bin/env python3
"""Regenerates the curve, line-list and table fixtures under data/."""
import math
import pathlib
import sys

HARTREE_CM1 = 219474.6313632
AMU = 1822.888486209

out = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else pathlib.Path(__file__).resolve().parent.parent / "data")
out.mkdir(parents=True, exist_ok=True)


def fmt(x):
    return repr(float(x))


def write(name, header, columns, rows):
    with open(out / name, "w") as f:
        f.write("# " + " ".join(f"{k}={v}" for k, v in header.items()) + "\n")
        if columns:
            f.write(",".join(columns) + "\n")
        for r in rows:
            f.write(",".join(x if isinstance(x, str) else fmt(x) for x in r) + "\n")


def morse(r, de, a, re, shift=0.0):
    e = math.exp(-a * (r - re))
    return de * ((1.0 - e) ** 2 - 1.0) + shift


# Morse oscillator: De = 0.02, a = 0.5, Re = 8, used with mu = 20000
MORSE = dict(de=0.02, a=0.5, re=8.0)
rs = [4.5 + 0.01 * i for i in range(4001)]
write("morse_dense.dat",
      {"kind": "potential", "label": "M", "lambda": 0, "unit_R": "bohr", "unit_V": "hartree", "dissociation": 0},
      ["R_bohr", "V_hartree"], [(r, morse(r, **MORSE)) for r in rs])
rs = [4.5 + 40.0 * i / 199 for i in range(200)]
write("morse_200.dat",
      {"kind": "potential", "label": "M", "lambda": 0, "unit_R": "bohr", "unit_V": "hartree", "dissociation": 0},
      ["R_bohr", "V_hartree"], [(r, morse(r, **MORSE)) for r in rs])
# patch for the splice tests: deeper well over 6..11 bohr
rs = [6.0 + 0.05 * i for i in range(101)]
write("morse_patch.dat",
      {"kind": "potential", "label": "M", "lambda": 0, "unit_R": "bohr", "unit_V": "hartree", "dissociation": 0},
      ["R_bohr", "V_hartree"], [(r, morse(r, 0.021, 0.5, 8.0)) for r in rs])

# excited partner of the Morse pair (sum-rule fixture) and its dipole
rs = [4.5 + 0.01 * i for i in range(4001)]
write("morse_upper.dat",
      {"kind": "potential", "label": "U", "lambda": 0, "unit_R": "bohr", "unit_V": "hartree", "dissociation": 0.05},
      ["R_bohr", "V_hartree"], [(r, morse(r, 0.015, 0.45, 8.6, 0.05)) for r in rs])
write("morse_pair_dipole.dat",
      {"kind": "dipole", "from": "M", "to": "U", "orientation": "parallel", "unit_R": "bohr", "unit_V": "au"},
      ["R_bohr", "d_au"], [(r, 2.0 + 0.3 * math.tanh((r - 9.0) / 2.0)) for r in rs])

# harmonic oscillator: omega = 7.07e-4, mu = 20000, Re = 8
w, mu = 7.07e-4, 20000.0
rs = [4.0 + 0.01 * i for i in range(801)]
write("harmonic.dat",
      {"kind": "potential", "label": "H", "lambda": 0, "unit_R": "bohr", "unit_V": "hartree", "dissociation": 30 * w},
      ["R_bohr", "V_hartree"], [(r, 0.5 * mu * w * w * (r - 8.0) ** 2) for r in rs])

# pure dispersion tail -C6/R^6
rs = [10.0 + 0.25 * i for i in range(121)]
write("c6_tail.dat",
      {"kind": "potential", "label": "L", "lambda": 0, "unit_R": "bohr", "unit_V": "hartree", "dissociation": 0, "C6": 6000},
      ["R_bohr", "V_hartree"], [(r, -6000.0 / r ** 6) for r in rs])

# Cs 6s -> np lines: energy (cm^-1) and reduced dipole <6s||d||np> (a.u.)
CS = [(11178.268, 4.489), (11732.307, 6.324), (21765.348, 0.2757), (21946.397, 0.5856),
      (25709.14, 0.0814), (25791.51, 0.2184), (27637.00, 0.0430), (27681.68, 0.1266),
      (28726.81, 0.0274), (28753.68, 0.0847)]
write("cs_lines.dat",
      {"kind": "atomic_lines", "unit_omega": "cm-1", "dipole": "reduced", "j_lower": 0.5, "alpha_core": 15.4,
       "alpha_core_valence": 0},
      ["omega_cm-1", "D_au"], CS)

# J=2 anisotropy table: one parallel and one perpendicular undamped line chosen so that
# alpha_par = 6453.25 and alpha_perp = 1106.13 a.u. at 9394.08 cm^-1
wl = 9394.08 / HARTREE_CM1
rows = []
for o_cm1, alpha, orient in [(11500.0, 6453.25, "parallel"), (12500.0, 1106.13, "perpendicular")]:
    wf = o_cm1 / HARTREE_CM1
    d2 = alpha * (wf * wf - wl * wl) / (2.0 * wf)
    rows.append((wf, 0.0, d2, orient, "-", "0"))
write("j2_table.dat", {"kind": "transition_table", "unit_omega": "hartree"},
      ["omega", "gamma", "d2", "orientation", "excited", "v_f"], rows)

# synthetic crossing: one far line (in both orientations, so any rotational state sees it whole) against a line-free atom with a constant core term.
# 2 w_f d2 / (w_f^2 - w^2) = 2 alpha_c at w0 = 10000 cm^-1
wf, w0, ac = 30000.0 / HARTREE_CM1, 10000.0 / HARTREE_CM1, 500.0
d2 = 2 * ac * (wf * wf - w0 * w0) / (2 * wf)
write("crossing_table.dat", {"kind": "transition_table", "unit_omega": "hartree"},
      ["omega", "gamma", "d2", "orientation", "excited", "v_f"],
      [(wf, 2.4188843265857e-9, d2, o, "-", "0") for o in ("parallel", "perpendicular")])
write("flat_atom.dat", {"kind": "atomic_lines", "unit_omega": "cm-1", "dipole": "d2", "alpha_core": ac},
      ["omega_cm-1", "d2_au"], [])

# triplet-style pair: the molecule sits above the pair reference everywhere except on its own resonances
write("triplet_table.dat", {"kind": "transition_table", "unit_omega": "cm-1", "gamma_unit": "MHz"},
      ["omega", "gamma", "d2", "orientation", "excited", "v_f"],
      [(w, 15.9, d2, o, "T", str(v)) for v, (w, d2) in enumerate([(9000.0, 1e-3), (11000.0, 2e-3), (11800.0, 30.0)])
       for o in ("parallel", "perpendicular")])
write("triplet_atom.dat",
      {"kind": "atomic_lines", "unit_omega": "cm-1", "dipole": "d2", "gamma_unit": "MHz", "alpha_core": 0},
      ["omega_cm-1", "d2_au", "gamma_MHz"], [(11800.0, 10.0, 15.9)])

# toy Cs2-like system: X, coupled A/b, B; energies in cm^-1 relative to the X asymptote
MU_CS2 = 132.905451933 / 2.0


def morse_cm1(r, de, we, re, top):
    a = (we / HARTREE_CM1) * math.sqrt(MU_CS2 * AMU / (2.0 * de / HARTREE_CM1))
    e = math.exp(-a * (r - re))
    return top - de + de * (1.0 - e) ** 2


rs = [5.0 + 0.05 * i for i in range(701)]
TOY = {
    "X": dict(de=3650.0, we=42.0, re=8.78, top=0.0, lam=0, spin="singlet", par="g"),
    "A": dict(de=5600.0, we=34.0, re=9.85, top=11547.0, lam=0, spin="singlet", par="u"),
    "b": dict(de=3400.0, we=41.0, re=8.60, top=11178.0, lam=1, spin="triplet", par="u"),
    "B": dict(de=3100.0, we=34.0, re=9.90, top=14600.0, lam=1, spin="singlet", par="u"),
}
for name, p in TOY.items():
    write(f"toy_{name}.dat",
          {"kind": "potential", "label": name, "lambda": p["lam"], "spin": p["spin"], "parity": p["par"],
           "unit_R": "bohr", "unit_V": "cm-1", "dissociation": p["top"]},
          ["R_bohr", "V_cm-1"], [(r, morse_cm1(r, p["de"], p["we"], p["re"], p["top"])) for r in rs])
write("toy_Ab_so.dat", {"kind": "spin_orbit", "unit_R": "bohr", "unit_V": "cm-1"},
      ["R_bohr", "W_cm-1"], [(r, 180.0 + 40.0 * math.exp(-((r - 9.0) / 2.0) ** 2)) for r in rs])
write("toy_XA_dipole.dat",
      {"kind": "dipole", "from": "X", "to": "A", "orientation": "parallel", "unit_R": "bohr", "unit_V": "au"},
      ["R_bohr", "d_au"], [(r, 5.3 + 0.6 * math.tanh((r - 10.0) / 3.0)) for r in rs])
write("toy_XB_dipole.dat",
      {"kind": "dipole", "from": "X", "to": "B", "orientation": "perpendicular", "unit_R": "bohr", "unit_V": "au"},
      ["R_bohr", "d_au"], [(r, 4.3 + 0.5 * math.tanh((r - 10.0) / 3.0)) for r in rs])
