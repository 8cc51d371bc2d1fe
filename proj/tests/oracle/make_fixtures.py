#!/usr/bin/env python3
"""Freeze reference-model outputs into JSON fixtures for the C++ test suites.

Everything here is computed with the independent NumPy/SciPy implementations
in reference_models.py against the committed asset files. Regenerate after an
asset change with:  python3 tests/oracle/make_fixtures.py
"""

import json
import os

import numpy as np

import reference_models as rm

HERE = os.path.dirname(os.path.abspath(__file__))
FIXTURE_DIR = os.path.normpath(os.path.join(HERE, "..", "fixtures"))

VAR_ORDER = ["N", "Cab", "Car", "Cbrown", "Cw", "Cm", "LAI", "ALA",
             "Hotspot", "SoilWet", "SoilBright",
             "SunZenith", "ViewZenith", "RelAzimuth"]

BOUNDS = {
    "N": (1.2, 1.8), "Cab": (20.0, 90.0), "Car": (5.0, 23.0),
    "Cbrown": (0.0, 2.0), "Cw": (0.0075, 0.075), "Cm": (0.003, 0.011),
    "LAI": (0.0, 10.0), "ALA": (30.0, 80.0), "Hotspot": (0.0, 0.5),
    "SoilWet": (0.0, 1.0), "SoilBright": (0.3, 3.5),
    "SunZenith": (15.0, 60.0), "ViewZenith": (0.0, 10.0),
    "RelAzimuth": (0.0, 180.0),
}

MIDPOINT = {k: 0.5 * (lo + hi) for k, (lo, hi) in BOUNDS.items()}


def draw_params(rng):
    p = {}
    for name in VAR_ORDER:
        lo, hi = BOUNDS[name]
        p[name] = float(lo + (hi - lo) * rng.random())
    # keep the hotspot integral's generic path exercised
    if p["Hotspot"] < 1e-3:
        p["Hotspot"] = 1e-3
    return p


def dump(name, obj):
    path = os.path.join(FIXTURE_DIR, name)
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=1)
    print("wrote", path)


def main():
    os.makedirs(FIXTURE_DIR, exist_ok=True)
    assets = rm.Assets()
    rng = np.random.Generator(np.random.PCG64(20240614))

    # --- forward-model band fixture: 100 random parameter vectors ----------
    cases = []
    for _ in range(100):
        p = draw_params(rng)
        bands, _ = rm.prosail_bands(assets, p)
        cases.append({"params": [p[k] for k in VAR_ORDER],
                      "bands": bands.tolist()})
    dump("forward_bands.json", {"variable_order": VAR_ORDER, "cases": cases})

    # --- leaf model curves --------------------------------------------------
    leaves = []
    leaf_cases = [
        {k: MIDPOINT[k] for k in ("N", "Cab", "Car", "Cbrown", "Cw", "Cm")},
        {"N": 1.3, "Cab": 25.0, "Car": 6.0, "Cbrown": 0.1, "Cw": 0.01, "Cm": 0.004},
        {"N": 1.75, "Cab": 82.0, "Car": 21.0, "Cbrown": 1.8, "Cw": 0.07, "Cm": 0.0105},
    ]
    for lp in leaf_cases:
        rho, tau = rm.prospect5(assets, lp["N"], lp["Cab"], lp["Car"],
                                lp["Cbrown"], lp["Cw"], lp["Cm"])
        leaves.append({"params": lp,
                       "reflectance": rho.tolist(),
                       "transmittance": tau.tolist()})
    # doubling chlorophyll must darken the green peak
    rho_1x, _ = rm.prospect5(assets, 1.5, 30.0, 10.0, 0.5, 0.02, 0.006)
    rho_2x, _ = rm.prospect5(assets, 1.5, 60.0, 10.0, 0.5, 0.02, 0.006)
    dump("prospect_curves.json", {
        "wavelength_start": assets.wl[0], "count": assets.wl.size,
        "cases": leaves,
        "r550_cab30": rho_1x[150], "r550_cab60": rho_2x[150]})

    # --- canopy spectra -----------------------------------------------------
    canopy_cases = []
    scenarios = [
        dict(MIDPOINT),
        dict(MIDPOINT, LAI=1.2, ALA=35.0, SoilWet=0.1, SoilBright=2.8,
             SunZenith=22.0, ViewZenith=9.0, RelAzimuth=10.0),
        dict(MIDPOINT, LAI=8.5, Cab=70.0, Hotspot=0.45, SoilBright=0.6,
             SunZenith=55.0, ViewZenith=1.0, RelAzimuth=165.0),
        # exact-backscatter geometry exercises the hotspot limit branch
        dict(MIDPOINT, SunZenith=20.0, ViewZenith=20.0, RelAzimuth=0.0),
        # azimuth contrast pair
        dict(MIDPOINT, ViewZenith=10.0, RelAzimuth=0.0),
        dict(MIDPOINT, ViewZenith=10.0, RelAzimuth=180.0),
    ]
    for p in scenarios:
        bands, brf = rm.prosail_bands(assets, p)
        canopy_cases.append({"params": [p[k] for k in VAR_ORDER],
                             "bands": bands.tolist(),
                             "spectrum": brf.tolist()})
    # soil occlusion scenario: NIR soil-brightness sensitivity shrinks
    # as the canopy closes
    occl = {}
    for tag, lai in (("lai1", 1.0), ("lai10", 10.0)):
        dark, _ = rm.prosail_bands(assets, dict(MIDPOINT, LAI=lai, SoilBright=0.4))
        bright, _ = rm.prosail_bands(assets, dict(MIDPOINT, LAI=lai, SoilBright=3.0))
        occl[tag] = {"dark": dark.tolist(), "bright": bright.tolist()}
    dump("sail_spectra.json", {"variable_order": VAR_ORDER,
                               "cases": canopy_cases,
                               "soil_occlusion": occl})

    # --- leaf inclination distribution weights ------------------------------
    lidf = {"%.1f" % ala: rm.lidf_quadrature(ala).tolist()
            for ala in (30.0, 35.0, 40.0, 45.0, 50.0, 55.0, 57.3,
                        60.0, 65.0, 70.0, 75.0, 80.0)}
    dump("lidf_weights.json", lidf)

    # --- exponential integral spot values -----------------------------------
    from scipy.special import exp1
    xs = [1e-8, 1e-6, 1e-4, 0.01, 0.1, 0.5, 1.0, 1.5, 2.0, 5.0, 10.0, 30.0, 80.0]
    dump("expint_e1.json", {"x": xs, "e1": [float(exp1(x)) for x in xs]})


if __name__ == "__main__":
    main()
