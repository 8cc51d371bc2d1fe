#!/usr/bin/env python3
"""Generate the bundled spectral constant assets.

Writes three plain-text tables on a 400-2500 nm, 1 nm grid plus a sha256
manifest:

  assets/prospect5_coefficients.txt  wavelength, refractive index and the five
                                     specific absorption coefficients used by
                                     the PROSPECT-5 leaf model
  assets/soil_spectra.txt            dry / wet soil reflectance basis
  assets/sentinel2_srf.txt           10-band Sentinel-2 style spectral response
                                     functions (B2-B8, B8A, B11, B12)

The curves are smooth analytic constructions with the magnitudes and feature
positions of the published constants (pigment absorption peaks near 430 and
670 nm, liquid water bands at 970/1200/1450/1940/2500 nm, dry matter SWIR
features, declining refractive index). They are bundled so the toolchain is
reproducible offline; regenerate with this script if the grid or shapes need
to change, then update the manifest.
"""

import hashlib
import os

import numpy as np

HERE = os.path.dirname(os.path.abspath(__file__))
ASSET_DIR = os.path.normpath(os.path.join(HERE, "..", "assets"))

WL = np.arange(400.0, 2501.0, 1.0)  # nm


def gauss(center, width):
    return np.exp(-(((WL - center) / width) ** 2))


def refractive_index():
    return 1.335 + 0.185 * np.exp(-(WL - 400.0) / 1100.0)


def k_chlorophyll():
    k = (0.140 * gauss(425.0, 36.0)
         + 0.045 * gauss(470.0, 40.0)
         + 0.018 * gauss(530.0, 80.0)
         + 0.085 * gauss(672.0, 27.0)
         + 0.020 * gauss(625.0, 40.0))
    k[WL > 800.0] = 0.0
    return k


def k_carotenoid():
    k = 0.120 * gauss(452.0, 28.0) + 0.100 * gauss(488.0, 24.0)
    k[WL > 600.0] = 0.0
    return k


def k_brown():
    return 0.35 * np.exp(-(WL - 400.0) / 130.0)


def k_water():
    k = (0.50 * gauss(970.0, 35.0)
         + 1.10 * gauss(1195.0, 70.0)
         + 29.0 * gauss(1450.0, 65.0)
         + 6.0 * gauss(1790.0, 90.0)
         + 125.0 * gauss(1940.0, 95.0)
         + 62.0 * gauss(2500.0, 160.0))
    k[WL < 880.0] = 0.0
    return k


def k_dry_matter():
    return (0.8 + 0.0009 * (WL - 400.0)
            + 30.0 * gauss(1730.0, 80.0)
            + 45.0 * gauss(2100.0, 110.0)
            + 60.0 * gauss(2320.0, 120.0))


def soil_curves():
    dry = (0.04 + 0.28 * (1.0 - np.exp(-(WL - 400.0) / 700.0))
           - 0.025 * gauss(1430.0, 90.0)
           - 0.040 * gauss(1920.0, 110.0)
           - 0.020 * gauss(2210.0, 140.0))
    wet = (0.55 * dry
           - 0.030 * gauss(1450.0, 100.0)
           - 0.050 * gauss(1940.0, 120.0))
    return np.clip(dry, 0.0, 1.0), np.clip(wet, 0.005, 1.0)


# (band id, center nm, FWHM nm); B1 (443), B9 (940) and B10 (cirrus) excluded.
S2_BANDS = [
    ("B2", 492.4, 66.0),
    ("B3", 559.8, 36.0),
    ("B4", 664.6, 31.0),
    ("B5", 704.1, 15.0),
    ("B6", 740.5, 15.0),
    ("B7", 782.8, 20.0),
    ("B8", 832.8, 106.0),
    ("B8A", 864.7, 21.0),
    ("B11", 1613.7, 91.0),
    ("B12", 2202.4, 175.0),
]


def srf_matrix():
    # Flat-topped super-Gaussian with the nominal FWHM; truncated below 1e-6.
    out = np.zeros((WL.size, len(S2_BANDS)))
    for j, (_, center, fwhm) in enumerate(S2_BANDS):
        w = np.exp(-np.log(2.0) * (2.0 * (WL - center) / fwhm) ** 6)
        w[w < 1e-6] = 0.0
        out[:, j] = w
    return out


def write_table(path, header_lines, columns, fmt="%.8f"):
    with open(path, "w", newline="\n") as fh:
        for line in header_lines:
            fh.write("# " + line + "\n")
        for i in range(WL.size):
            row = ["%.1f" % WL[i]] + [fmt % col[i] for col in columns]
            fh.write(" ".join(row) + "\n")


def main():
    os.makedirs(ASSET_DIR, exist_ok=True)

    coeff_path = os.path.join(ASSET_DIR, "prospect5_coefficients.txt")
    write_table(
        coeff_path,
        ["prosail-tvae spectral constants v1",
         "columns: wavelength_nm n k_cab k_car k_brown k_cw k_cm",
         "units: nm, -, cm2/ug, cm2/ug, 1/a.u., 1/cm, cm2/g"],
        [refractive_index(), k_chlorophyll(), k_carotenoid(), k_brown(),
         k_water(), k_dry_matter()])

    soil_path = os.path.join(ASSET_DIR, "soil_spectra.txt")
    dry, wet = soil_curves()
    write_table(
        soil_path,
        ["prosail-tvae soil reflectance basis v1",
         "columns: wavelength_nm dry wet"],
        [dry, wet])

    srf_path = os.path.join(ASSET_DIR, "sentinel2_srf.txt")
    srf = srf_matrix()
    keep = np.any(srf > 0.0, axis=1)
    with open(srf_path, "w", newline="\n") as fh:
        fh.write("# prosail-tvae Sentinel-2 spectral response v1\n")
        fh.write("# columns: wavelength_nm " +
                 " ".join(b[0] for b in S2_BANDS) + "\n")
        for i in np.nonzero(keep)[0]:
            fh.write("%.1f " % WL[i] +
                     " ".join("%.6f" % v for v in srf[i]) + "\n")

    manifest_path = os.path.join(ASSET_DIR, "manifest.sha256")
    with open(manifest_path, "w", newline="\n") as fh:
        for path in (coeff_path, soil_path, srf_path):
            digest = hashlib.sha256(open(path, "rb").read()).hexdigest()
            fh.write("%s  %s\n" % (os.path.basename(path), digest))

    print("wrote assets to", ASSET_DIR)


if __name__ == "__main__":
    main()
