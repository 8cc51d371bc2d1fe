"""Reference implementations used to freeze test fixtures.

Independent re-implementations of the leaf/canopy radiative transfer stack:
NumPy/SciPy throughout, quadrature where the C++ library uses closed forms
(average interface transmissivity, leaf inclination distribution), and
scipy.special.exp1 for the absorbing-plate transmission. Run once via
make_fixtures.py; the C++ test suites compare against the frozen outputs.
"""

import os

import numpy as np
from scipy.integrate import quad
from scipy.special import exp1

HERE = os.path.dirname(os.path.abspath(__file__))
ASSET_DIR = os.path.normpath(os.path.join(HERE, "..", "..", "assets"))


# ---------------------------------------------------------------------------
# assets

def _read_table(path):
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            rows.append([float(tok) for tok in line.replace(",", " ").split()])
    return np.asarray(rows)


class Assets:
    def __init__(self, asset_dir=ASSET_DIR):
        coeff = _read_table(os.path.join(asset_dir, "prospect5_coefficients.txt"))
        self.wl = coeff[:, 0]
        self.n = coeff[:, 1]
        self.kcab = coeff[:, 2]
        self.kcar = coeff[:, 3]
        self.kbrown = coeff[:, 4]
        self.kcw = coeff[:, 5]
        self.kcm = coeff[:, 6]

        soil = _read_table(os.path.join(asset_dir, "soil_spectra.txt"))
        assert np.array_equal(soil[:, 0], self.wl)
        self.soil_dry = soil[:, 1]
        self.soil_wet = soil[:, 2]

        srf = _read_table(os.path.join(asset_dir, "sentinel2_srf.txt"))
        self.srf = np.zeros((self.wl.size, srf.shape[1] - 1))
        index = {w: i for i, w in enumerate(self.wl)}
        for row in srf:
            self.srf[index[row[0]], :] = row[1:]

        # interface transmissivities are pure functions of n; cache them
        self.talf = np.array([tav_quadrature(40.0, nv) for nv in self.n])
        self.t12 = np.array([tav_quadrature(90.0, nv) for nv in self.n])

    def convolve(self, spectrum):
        num = self.srf.T @ spectrum
        den = self.srf.sum(axis=0)
        return num / den


# ---------------------------------------------------------------------------
# leaf model

def fresnel_transmissivity(theta, n):
    if theta < 1e-12:
        return 4.0 * n / (n + 1.0) ** 2
    tt = np.arcsin(np.sin(theta) / n)
    ts = np.sin(2 * theta) * np.sin(2 * tt) / np.sin(theta + tt) ** 2
    tp = ts / np.cos(theta - tt) ** 2
    return 0.5 * (ts + tp)


def tav_quadrature(alpha_deg, n):
    """Average transmissivity of a dielectric interface for incidence cones
    up to alpha, via direct quadrature of the Fresnel coefficients."""
    a = np.radians(alpha_deg)
    num, _ = quad(lambda t: fresnel_transmissivity(t, n) * np.sin(t) * np.cos(t),
                  0.0, a, epsabs=1e-13, epsrel=1e-12, limit=200)
    return num / (0.5 * np.sin(a) ** 2)


def prospect5(assets, n_struct, cab, car, cbrown, cw, cm):
    """Generalized plate model; returns (reflectance, transmittance)."""
    k = (cab * assets.kcab + car * assets.kcar + cbrown * assets.kbrown
         + cw * assets.kcw + cm * assets.kcm) / n_struct

    trans_plate = np.ones_like(k)
    pos = k > 1e-8
    kp = k[pos]
    trans_plate[pos] = (1.0 - kp) * np.exp(-kp) + kp * kp * exp1(kp)
    trans_plate[~pos] = 1.0 - 2.0 * k[~pos]

    talf = assets.talf
    t12 = assets.t12
    ralf = 1.0 - talf
    r12 = 1.0 - t12
    t21 = t12 / assets.n**2
    r21 = 1.0 - t21

    denom = 1.0 - r21 * r21 * trans_plate * trans_plate
    Ta = talf * trans_plate * t21 / denom
    Ra = ralf + r21 * trans_plate * Ta
    t = t12 * trans_plate * t21 / denom
    r = r12 + r21 * trans_plate * t

    D = np.sqrt(np.maximum((1 + r + t) * (1 + r - t) * (1 - r + t) * (1 - r - t), 0.0))
    rq = r * r
    tq = t * t
    a = (1 + rq - tq + D) / (2 * r)
    b = (1 - rq + tq + D) / (2 * t)

    bNm1 = np.power(b, n_struct - 1.0)
    bN2 = bNm1 * bNm1
    a2 = a * a
    with np.errstate(invalid="ignore", divide="ignore"):
        denom = a2 * bN2 - 1.0
        Rsub = a * (bN2 - 1.0) / denom
        Tsub = bNm1 * (a2 - 1.0) / denom

    # non-absorbing limit: the doubling denominators vanish
    nonabs = (r + t) >= 1.0
    Tsub[nonabs] = t[nonabs] / (t[nonabs] + (1.0 - t[nonabs]) * (n_struct - 1.0))
    Rsub[nonabs] = 1.0 - Tsub[nonabs]

    denom = 1.0 - Rsub * r
    trans = Ta * Tsub / denom
    refl = Ra + Ta * Rsub * t / denom
    return refl, trans


# ---------------------------------------------------------------------------
# canopy model

LIDF_UPPER = [10, 20, 30, 40, 50, 60, 70, 80, 82, 84, 86, 88, 90]
LIDF_LOWER = [0, 10, 20, 30, 40, 50, 60, 70, 80, 82, 84, 86, 88]
LIDF_MID = [5, 15, 25, 35, 45, 55, 65, 75, 81, 83, 85, 87, 89]


def excentricity(ala_deg):
    return np.exp(-1.6184e-5 * ala_deg**3 + 2.1145e-3 * ala_deg**2
                  - 1.2390e-1 * ala_deg + 3.2491)


def lidf_quadrature(ala_deg):
    """Ellipsoidal leaf inclination weights via numeric bin integration."""
    chi = excentricity(ala_deg)

    def density(t):
        return np.sin(t) / (np.cos(t) ** 2 + chi * chi * np.sin(t) ** 2) ** 2

    bins = np.array([quad(density, np.radians(lo), np.radians(hi),
                          epsabs=1e-14, epsrel=1e-13)[0]
                     for lo, hi in zip(LIDF_LOWER, LIDF_UPPER)])
    return bins / bins.sum()


def volscatt(tts, tto, psi, ttl):
    cts = np.cos(np.radians(tts))
    cto = np.cos(np.radians(tto))
    sts = np.sin(np.radians(tts))
    sto = np.sin(np.radians(tto))
    cospsi = np.cos(np.radians(psi))
    psir = np.radians(psi)
    cttl = np.cos(np.radians(ttl))
    sttl = np.sin(np.radians(ttl))
    cs = cttl * cts
    co = cttl * cto
    ss = sttl * sts
    so = sttl * sto

    cosbts = 5.0
    if abs(ss) > 1e-6:
        cosbts = -cs / ss
    cosbto = 5.0
    if abs(so) > 1e-6:
        cosbto = -co / so

    if abs(cosbts) < 1.0:
        bts = np.arccos(cosbts)
        ds = ss
    else:
        bts = np.pi
        ds = cs
    chi_s = 2.0 / np.pi * ((bts - np.pi * 0.5) * cs + np.sin(bts) * ss)

    if abs(cosbto) < 1.0:
        bto = np.arccos(cosbto)
        do_ = so
    else:
        if tto < 90.0:
            bto = np.pi
            do_ = co
        else:
            bto = 0.0
            do_ = -co
    chi_o = 2.0 / np.pi * ((bto - np.pi * 0.5) * co + np.sin(bto) * so)

    btran1 = abs(bts - bto)
    btran2 = np.pi - abs(bts + bto - np.pi)
    if psir <= btran1:
        bt1, bt2, bt3 = psir, btran1, btran2
    else:
        bt1 = btran1
        if psir <= btran2:
            bt2, bt3 = psir, btran2
        else:
            bt2, bt3 = btran2, psir

    t1 = 2.0 * cs * co + ss * so * cospsi
    t2 = 0.0
    if bt2 > 0.0:
        t2 = np.sin(bt2) * (2.0 * ds * do_ + ss * so * np.cos(bt1) * np.cos(bt3))

    denom = 2.0 * np.pi**2
    frho = ((np.pi - bt2) * t1 + t2) / denom
    ftau = (-bt2 * t1 + t2) / denom
    return chi_s, chi_o, max(frho, 0.0), max(ftau, 0.0)


def jfunc1(k, l, t):
    d = (k - l) * t
    out = np.where(np.abs(d) > 1e-3,
                   (np.exp(-l * t) - np.exp(-k * t)) / np.where(np.abs(d) > 1e-3, k - l, 1.0),
                   0.5 * t * (np.exp(-k * t) + np.exp(-l * t)) * (1.0 - d * d / 12.0))
    return out


def jfunc2(k, l, t):
    return (1.0 - np.exp(-(k + l) * t)) / (k + l)


def hotspot_integral(alf, lai, ks, ko, tss):
    if alf < 1e-12:
        tsstoo = tss
        sumint = (1.0 - tss) / (ks * lai)
        return tsstoo, sumint
    fhot = lai * np.sqrt(ko * ks)
    x1 = 0.0
    y1 = 0.0
    f1 = 1.0
    fint = (1.0 - np.exp(-alf)) * 0.05
    sumint = 0.0
    for istep in range(1, 21):
        if istep < 20:
            x2 = -np.log(1.0 - istep * fint) / alf
        else:
            x2 = 1.0
        y2 = -(ko + ks) * lai * x2 + fhot * (1.0 - np.exp(-alf * x2)) / alf
        f2 = np.exp(y2)
        sumint += (f2 - f1) * (x2 - x1) / (y2 - y1)
        x1, y1, f1 = x2, y2, f2
    return f1, sumint


def sail4(rho, tau, rsoil, lai, ala_deg, hotspot, tts, tto, psi,
          lidf=None):
    """Four-stream canopy bidirectional reflectance factor."""
    if lai <= 0.0:
        return rsoil.copy()
    if lidf is None:
        lidf = lidf_quadrature(ala_deg)

    cts = np.cos(np.radians(tts))
    cto = np.cos(np.radians(tto))
    ctscto = cts * cto
    tants = np.tan(np.radians(tts))
    tanto = np.tan(np.radians(tto))
    cospsi = np.cos(np.radians(psi))
    dso = np.sqrt(max(tants**2 + tanto**2 - 2.0 * tants * tanto * cospsi, 0.0))

    ks = ko = bf = sob = sof = 0.0
    for w, ttl in zip(lidf, LIDF_MID):
        chi_s, chi_o, frho, ftau = volscatt(tts, tto, psi, ttl)
        ks += w * chi_s / cts
        ko += w * chi_o / cto
        bf += w * np.cos(np.radians(ttl)) ** 2
        sob += w * frho * np.pi / ctscto
        sof += w * ftau * np.pi / ctscto

    sdb = 0.5 * (ks + bf)
    sdf = 0.5 * (ks - bf)
    dob = 0.5 * (ko + bf)
    dof = 0.5 * (ko - bf)
    ddb = 0.5 * (1.0 + bf)
    ddf = 0.5 * (1.0 - bf)

    sigb = ddb * rho + ddf * tau
    sigf = ddf * rho + ddb * tau
    att = 1.0 - sigf
    m = np.sqrt(np.maximum((att + sigb) * (att - sigb), 0.0))
    sb = sdb * rho + sdf * tau
    sf = sdf * rho + sdb * tau
    vb = dob * rho + dof * tau
    vf = dof * rho + dob * tau
    w_ = sob * rho + sof * tau

    e1 = np.exp(-m * lai)
    e2 = e1 * e1
    rinf = (att - m) / sigb
    rinf2 = rinf * rinf
    re = rinf * e1
    denom = 1.0 - rinf2 * e2

    J1ks = jfunc1(ks, m, lai)
    J2ks = jfunc2(ks, m, lai)
    J1ko = jfunc1(ko, m, lai)
    J2ko = jfunc2(ko, m, lai)

    Ps = (sf + sb * rinf) * J1ks
    Qs = (sf * rinf + sb) * J2ks
    Pv = (vf + vb * rinf) * J1ko
    Qv = (vf * rinf + vb) * J2ko

    tdd = (1.0 - rinf2) * e1 / denom
    rdd = rinf * (1.0 - e2) / denom
    tsd = (Ps - re * Qs) / denom
    rsd = (Qs - re * Ps) / denom
    tdo = (Pv - re * Qv) / denom
    rdo = (Qv - re * Pv) / denom

    tss = np.exp(-ks * lai)
    too = np.exp(-ko * lai)
    z = jfunc2(ks, ko, lai)
    g1 = (z - J1ks * too) / (ko + m)
    g2 = (z - J1ko * tss) / (ks + m)

    Tv1 = (vf * rinf + vb) * g1
    Tv2 = (vf + vb * rinf) * g2
    T1 = Tv1 * (sf + sb * rinf)
    T2 = Tv2 * (sf * rinf + sb)
    T3 = (rdo * Qs + tdo * Ps) * rinf
    rsod = (T1 + T2 - T3) / (1.0 - rinf2)

    if hotspot <= 0.0:
        ksko_lai = (ks + ko) * lai
        tsstoo = np.exp(-ksko_lai)
        sumint = (1.0 - np.exp(-ksko_lai)) / ksko_lai
    else:
        alf = (dso / hotspot) * 2.0 / (ks + ko)
        tsstoo, sumint = hotspot_integral(alf, lai, ks, ko, tss)

    rsos = w_ * lai * sumint
    rso = rsos + rsod

    dn = 1.0 - rsoil * rdd
    rsost = rso + tsstoo * rsoil
    rsodt = ((tss + tsd) * tdo + (tsd + tss * rsoil * rdd) * too) * rsoil / dn
    return rsost + rsodt


def soil_spectrum(assets, soil_wet, soil_bright):
    mix = soil_bright * (soil_wet * assets.soil_wet + (1.0 - soil_wet) * assets.soil_dry)
    return np.clip(mix, 0.0, 1.0)


def prosail_bands(assets, params):
    """params: dict with keys N,Cab,Car,Cbrown,Cw,Cm,LAI,ALA,Hotspot,
    SoilWet,SoilBright,SunZenith,ViewZenith,RelAzimuth."""
    rho, tau = prospect5(assets, params["N"], params["Cab"], params["Car"],
                         params["Cbrown"], params["Cw"], params["Cm"])
    rsoil = soil_spectrum(assets, params["SoilWet"], params["SoilBright"])
    brf = sail4(rho, tau, rsoil, params["LAI"], params["ALA"], params["Hotspot"],
                params["SunZenith"], params["ViewZenith"], params["RelAzimuth"])
    return assets.convolve(brf), brf
