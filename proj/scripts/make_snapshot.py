#!/usr/bin/env python3
"""Regenerate the synthetic WNVDB snapshot bundled under tests/data/.

The snapshot is a deterministic, self-consistent stand-in for the public
surveillance database: per-year folders with national, human, entomological,
equid and bird CSV files, plus the latest-wnv.csv rollup and a daily weather
extract. Season totals, regional/provincial splits and the weekly shapes of
the four modeled outbreaks are pinned so the test suite can assert exact
numbers against them.

Run from the repository root:

    python3 scripts/make_snapshot.py

The output is committed; rerunning must reproduce it byte for byte.
"""

import datetime as dt
import math
import os
import random
import shutil

import numpy as np
from scipy import optimize

ROOT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..",
                    "tests", "data")
DB = os.path.join(ROOT, "wnvdb")

# --- registry (mirrors include/wnv/geo.hpp) ----------------------------------

REGIONS = {
    "01": ("Piemonte", 45.06, 7.92),
    "03": ("Lombardia", 45.62, 9.77),
    "05": ("Veneto", 45.65, 11.85),
    "06": ("Friuli-Venezia Giulia", 46.15, 13.05),
    "08": ("Emilia-Romagna", 44.53, 11.04),
    "12": ("Lazio", 41.98, 12.77),
    "20": ("Sardegna", 40.09, 9.05),
}

PROVINCES = {
    "001": ("Torino", "TO", "01", 45.07, 7.69),
    "002": ("Vercelli", "VC", "01", 45.32, 8.42),
    "003": ("Novara", "NO", "01", 45.45, 8.62),
    "006": ("Alessandria", "AL", "01", 44.91, 8.62),
    "015": ("Milano", "MI", "03", 45.47, 9.19),
    "017": ("Brescia", "BS", "03", 45.54, 10.22),
    "018": ("Pavia", "PV", "03", 45.19, 9.16),
    "019": ("Cremona", "CR", "03", 45.13, 10.02),
    "020": ("Mantova", "MN", "03", 45.16, 10.79),
    "023": ("Verona", "VR", "05", 45.44, 10.99),
    "024": ("Vicenza", "VI", "05", 45.55, 11.55),
    "026": ("Treviso", "TV", "05", 45.67, 12.24),
    "027": ("Venezia", "VE", "05", 45.44, 12.32),
    "028": ("Padova", "PD", "05", 45.41, 11.88),
    "029": ("Rovigo", "RO", "05", 45.07, 11.79),
    "030": ("Udine", "UD", "06", 46.07, 13.23),
    "032": ("Trieste", "TS", "06", 45.65, 13.77),
    "093": ("Pordenone", "PN", "06", 45.96, 12.66),
    "034": ("Parma", "PR", "08", 44.80, 10.33),
    "035": ("Reggio nell'Emilia", "RE", "08", 44.70, 10.63),
    "036": ("Modena", "MO", "08", 44.65, 10.93),
    "037": ("Bologna", "BO", "08", 44.49, 11.34),
    "038": ("Ferrara", "FE", "08", 44.84, 11.62),
    "039": ("Ravenna", "RA", "08", 44.42, 12.20),
    "058": ("Roma", "RM", "12", 41.89, 12.48),
    "059": ("Latina", "LT", "12", 41.47, 12.90),
    "090": ("Sassari", "SS", "20", 40.73, 8.56),
    "092": ("Cagliari", "CA", "20", 39.22, 9.12),
    "095": ("Oristano", "OR", "20", 39.90, 8.59),
}

SEASONS = {
    2012: (dt.date(2012, 9, 4), 12),
    2013: (dt.date(2013, 7, 2), 16),
    2014: (dt.date(2014, 7, 8), 14),
    2015: (dt.date(2015, 7, 7), 15),
    2016: (dt.date(2016, 7, 5), 16),
    2017: (dt.date(2017, 7, 4), 16),
    2018: (dt.date(2018, 6, 5), 24),
    2019: (dt.date(2019, 7, 2), 16),
    2020: (dt.date(2020, 7, 7), 15),
    2021: (dt.date(2021, 7, 6), 15),
    2022: (dt.date(2022, 6, 7), 22),  # ends 2022-11-01
}

# --- pinned totals -------------------------------------------------------------

# human counted totals per region and year (sum of non-masked weekly counts)
HUMAN_REGION_YEAR = {
    "05": {2012: 32, 2013: 42, 2014: 12, 2015: 38, 2016: 48, 2017: 33,
           2018: 256, 2019: 17, 2020: 16, 2021: 14, 2022: 205},   # 713
    "08": {2012: 10, 2013: 14, 2014: 6, 2015: 12, 2016: 15, 2017: 11,
           2018: 158, 2019: 4, 2020: 4, 2021: 3, 2022: 170},      # 407
    "03": {2012: 5, 2014: 6, 2015: 6, 2016: 8, 2017: 7, 2018: 80,
           2019: 4, 2022: 110},
    "01": {2017: 4, 2018: 45, 2022: 60},
    "06": {2016: 4, 2018: 25, 2022: 30},
    "12": {2012: 3, 2013: 14, 2015: 4, 2018: 12, 2022: 16},
    "20": {2018: 5, 2022: 8},
}

PROVINCE_WEIGHTS = {
    "05": [("028", 0.42), ("027", 0.21), ("023", 0.14), ("026", 0.11),
           ("029", 0.07), ("024", 0.05)],
    "08": [("036", 0.29), ("037", 0.24), ("038", 0.18), ("035", 0.12),
           ("039", 0.10), ("034", 0.07)],
    "03": [("015", 0.35), ("018", 0.25), ("020", 0.25), ("017", 0.10),
           ("019", 0.05)],
    "01": [("001", 0.5), ("003", 0.25), ("006", 0.15), ("002", 0.10)],
    "06": [("030", 0.5), ("093", 0.3), ("032", 0.2)],
    "12": [("058", 0.8), ("059", 0.2)],
    "20": [("095", 0.5), ("092", 0.3), ("090", 0.2)],
}

PINNED_PROVINCES = {"028": 299, "027": 150, "036": 118, "037": 97}

AGE_TOKENS = ["<=14", "15-44", "45-64", "65-74", ">=75"]
AGE_PROBS = [0.010, 0.045, 0.215, 0.270, 0.460]
AGE_MISSING_SHARE = 0.03


def type_mix(year):
    if year <= 2017:
        return [("neuroinvasive", 1.0)]
    if year <= 2021:
        return [("neuroinvasive", 0.50), ("fever", 0.35),
                ("blood_donor", 0.15)]
    return [("neuroinvasive", 0.42), ("fever", 0.28), ("blood_donor", 0.15),
            ("symptomatic", 0.10), ("asymptomatic", 0.05)]


MOSQUITO_PLAN = {
    "08": {2017: 30, 2018: 110, 2019: 40, 2020: 35, 2021: 32, 2022: 120},
    "05": {2017: 15, 2018: 55, 2019: 20, 2020: 18, 2021: 16, 2022: 60},
    "03": {2017: 5, 2018: 18, 2019: 8, 2020: 7, 2021: 6, 2022: 15},
    "06": {2017: 5, 2018: 18, 2019: 7, 2020: 7, 2021: 6, 2022: 17},
    "01": {2017: 5, 2018: 15, 2019: 5, 2020: 3, 2021: 5, 2022: 27},
    "20": {2018: 4, 2022: 1},
}
MOSQUITO_PROVINCES = {
    "08": ["037", "036", "038", "035"],
    "05": ["028", "027", "029"],
    "03": ["020", "018"],
    "06": ["030", "093"],
    "01": ["001", "003"],
    "20": ["095"],
}

EQUID_PLAN = {
    "05": {2017: 8, 2018: 20, 2019: 10, 2020: 4, 2021: 3, 2022: 6},
    "03": {2017: 4, 2018: 10, 2019: 12, 2020: 11, 2021: 5, 2022: 8},
    "08": {2017: 3, 2018: 6, 2019: 4, 2020: 3, 2021: 3, 2022: 5},
    "01": {2017: 2, 2018: 4, 2019: 2, 2020: 2, 2021: 2, 2022: 3},
    "12": {2017: 1, 2018: 2, 2019: 2, 2020: 2, 2021: 1, 2022: 3},
}
EQUID_PROVINCES = {
    "05": ["023", "028", "029"],
    "03": ["020", "017", "019"],
    "08": ["037", "038"],
    "01": ["001", "006"],
    "12": ["058", "059"],
}

TARGET_BIRD_PLAN = {
    "08": {2017: 12, 2018: 30, 2019: 18, 2020: 15, 2021: 14, 2022: 28},
    "05": {2017: 6, 2018: 15, 2019: 8, 2020: 7, 2021: 7, 2022: 27},
    "03": {2017: 4, 2018: 8, 2019: 5, 2020: 4, 2021: 4, 2022: 8},
    "01": {2017: 3, 2018: 7, 2019: 4, 2020: 4, 2021: 3, 2022: 7},
}
WILD_BIRD_PLAN = {
    "08": {2017: 5, 2018: 12, 2019: 7, 2020: 6, 2021: 5, 2022: 9},
    "05": {2017: 3, 2018: 8, 2019: 5, 2020: 4, 2021: 3, 2022: 7},
    "03": {2017: 2, 2018: 5, 2019: 3, 2020: 2, 2021: 2, 2022: 4},
}
BIRD_PROVINCES = {
    "08": ["037", "036", "039"],
    "05": ["028", "026", "027"],
    "03": ["020", "015"],
    "01": ["001", "003"],
}
TARGET_SPECIES = [("Pica pica", 0.5), ("Corvus corone cornix", 0.3),
                  ("Garrulus glandarius", 0.2)]
WILD_SPECIES = ["Falco tinnunculus", "Columba livia", "Turdus merula",
                "Athene noctua", "Accipiter nisus", "Strix aluco",
                "Larus michahellis", "Passer domesticus"]

# the masking showcase: Lazio 2013 carries one transient over-report in week
# 2, published cumulative dips in week 3, the weekly count is masked to NA,
# and the counted total (14) exceeds the final cumulative (13)
LAZIO_2013_CUM = [3, 8, 7, 10, 13]

# shapes and noise for the four modeled outbreaks; the generation loop keeps
# trying seeds until the sample R2 of a Poisson growth-curve fit lands inside
# the tuning window around the published value
PINNED_FITS = {
    ("08", 2018): {"shape": (158, 0.85, 8.5, 1.0), "noise": ("poisson",),
                   "target": 0.91},
    ("05", 2018): {"shape": (256, 0.30, 11.0, 1.2), "noise": ("negbin", 6.0),
                   "target": 0.61},
    ("08", 2022): {"shape": (170, 0.38, 9.0, 1.0), "noise": ("negbin", 5.0),
                   "target": 0.56},
    ("05", 2022): {"shape": (205, 0.55, 9.5, 1.0), "noise": ("negbin", 25.0),
                   "target": 0.84},
}


# --- small helpers --------------------------------------------------------------

def week_dates(year):
    start, T = SEASONS[year]
    return [start + dt.timedelta(days=7 * w) for w in range(T)]


def bulletin(year, week_index):
    return ("https://www.epicentro.iss.it/westnile/bollettino/"
            f"WNV_News_{year}_{week_index + 1}.pdf")


def fmt(value):
    return "NA" if value is None else str(value)


def write_csv(path, header, rows):
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as out:
        out.write(",".join(header) + "\n")
        for row in rows:
            out.write(",".join(str(v) for v in row) + "\n")


def masked_diffs(cumulative):
    prev, out = 0, []
    for c in cumulative:
        out.append(c - prev if c >= prev else None)
        prev = c
    return out


def apportion(total, weights):
    raw = [(k, total * w) for k, w in weights]
    counts = {k: int(v) for k, v in raw}
    leftover = total - sum(counts.values())
    for k, _ in sorted(raw, key=lambda kv: -(kv[1] - int(kv[1])))[:leftover]:
        counts[k] += 1
    return counts


def split_cases(week_counts, quotas, rng):
    """Assign each case of each week to a category, honoring exact quotas."""
    remaining = {k: v for k, v in quotas.items() if v > 0}
    out = {k: [0] * len(week_counts) for k in quotas}
    for w, c in enumerate(week_counts):
        for _ in range(c):
            keys = sorted(remaining)
            k = rng.choices(keys, weights=[remaining[k] for k in keys])[0]
            remaining[k] -= 1
            if remaining[k] == 0:
                del remaining[k]
            out[k][w] += 1
    assert not remaining
    return out


# --- weekly curve machinery ------------------------------------------------------

def richards_increments(T, r, h, p, s):
    t = np.arange(0, T + 1, dtype=float)
    lam = r * np.exp(-s * np.logaddexp(0.0, h * (p - t)))
    return np.diff(lam)


def scale_to_total(counts, target, rng, weights):
    counts = list(counts)
    while sum(counts) > target:
        idx = rng.choices(range(len(counts)), weights=counts)[0]
        counts[idx] -= 1
    while sum(counts) < target:
        idx = rng.choices(range(len(counts)), weights=weights)[0]
        counts[idx] += 1
    return counts


def simulate_counts(T, total, shape, noise, seed):
    r, h, p, s = shape
    mu = np.maximum(richards_increments(T, r, h, p, s), 0.0)
    mu *= total / max(mu.sum(), 1e-9)
    rng_np = np.random.default_rng(seed)
    if noise[0] == "poisson":
        y = rng_np.poisson(mu)
    else:
        size = noise[1]
        y = rng_np.negative_binomial(size,
                                     size / (size + np.maximum(mu, 1e-9)))
        y = np.where(mu <= 0, 0, y)
    rng = random.Random(seed ^ 0xABCDEF)
    weights = [max(m, 1e-6) for m in mu]
    return scale_to_total([int(v) for v in y], total, rng, weights)


def poisson_r2(counts):
    """R2 of the best Poisson growth-curve fit; used only while tuning."""
    y = np.asarray(counts, dtype=float)
    T = len(y)

    def negll(theta):
        r, h, p, s = np.exp(theta[0]), theta[1], theta[2], np.exp(theta[3])
        if not np.isfinite(r) or s <= 0 or s > 10 or abs(h) > 10:
            return 1e12
        mu = np.maximum(richards_increments(T, r, h, p, s), 1e-10)
        return float(np.sum(mu - y * np.log(mu)))

    best = None
    p0 = float(np.argmax(y) + 1)
    for h0 in (0.3, 0.6, 0.9):
        for s0 in (0.5, 1.0, 2.0):
            theta0 = np.array([np.log(max(y.sum(), 1.0)), h0, p0, np.log(s0)])
            res = optimize.minimize(negll, theta0, method="Nelder-Mead",
                                    options={"maxiter": 6000, "xatol": 1e-8,
                                             "fatol": 1e-10})
            if best is None or res.fun < best.fun:
                best = res
    r, h, p, s = (np.exp(best.x[0]), best.x[1], best.x[2], np.exp(best.x[3]))
    fitted = richards_increments(T, r, h, p, s)
    ssr = float(np.sum((y - fitted) ** 2))
    sst = float(np.sum((y - y.mean()) ** 2))
    return 1.0 - ssr / sst


def weekly_region_counts(region, year, total):
    T = SEASONS[year][1]
    plan = PINNED_FITS.get((region, year))
    if plan:
        for limit, window in ((40, 0.04), (200, 0.06)):
            for seed in range(limit):
                counts = simulate_counts(T, total, plan["shape"],
                                         plan["noise"], seed * 7919 + year)
                r2 = poisson_r2(counts)
                if abs(r2 - plan["target"]) <= window:
                    print(f"  {region}/{year}: seed {seed} R2={r2:.3f}")
                    return counts
        raise SystemExit(f"no seed hits the R2 window for {region}/{year}")
    seed = int(region) * 10007 + year
    rng = random.Random(seed)
    shape = (total, 0.4 + 0.4 * rng.random(), T / 2.5, 1.0)
    return simulate_counts(T, total, shape, ("poisson",), seed)


def province_year_totals():
    per_year = {}
    for region, years in HUMAN_REGION_YEAR.items():
        for year, total in years.items():
            per_year[(region, year)] = apportion(total,
                                                 PROVINCE_WEIGHTS[region])
    # make the pooled totals of the pinned provinces exact by shifting cases
    # to/from unpinned provinces inside the same region-year
    for prov, target in PINNED_PROVINCES.items():
        region = PROVINCES[prov][2]
        pool = sum(per_year[(region, y)].get(prov, 0)
                   for y in HUMAN_REGION_YEAR[region])
        delta = target - pool
        years = sorted(HUMAN_REGION_YEAR[region],
                       key=lambda y: -HUMAN_REGION_YEAR[region][y])
        i = 0
        while delta != 0:
            counts = per_year[(region, years[i % len(years)])]
            others = [p for p in counts
                      if p != prov and p not in PINNED_PROVINCES
                      and counts[p] > 0]
            if others and (delta > 0 or counts[prov] > 0):
                other = max(others, key=lambda p: counts[p])
                step = 1 if delta > 0 else -1
                counts[prov] += step
                counts[other] -= step
                delta -= step
            i += 1
    return per_year


# --- human case allocation --------------------------------------------------------

# (year, prov) -> {(age, type): [weekly counts]}; prov "__none__" holds the
# records published without a province attribution
def build_human_cells():
    cells_by_prov = {}
    prov_totals = province_year_totals()
    print("human slices:")
    for region in sorted(HUMAN_REGION_YEAR):
        for year in sorted(HUMAN_REGION_YEAR[region]):
            if (region, year) == ("12", 2013):
                continue  # masking showcase, handcrafted at emission
            total = HUMAN_REGION_YEAR[region][year]
            counts = weekly_region_counts(region, year, total)
            rng = random.Random(int(region) * 1_000_003 + year * 17)
            quotas = dict(prov_totals[(region, year)])
            if (region, year) == ("05", 2018):
                donor = max((p for p in quotas if p not in PINNED_PROVINCES),
                            key=lambda p: quotas[p])
                quotas[donor] -= 2
                quotas["__none__"] = 2  # province "Not indicated"
            by_prov = split_cases(counts, quotas, rng)
            for prov, weekly in by_prov.items():
                cells = cells_by_prov.setdefault((year, prov), {})
                for w, c in enumerate(weekly):
                    for _ in range(c):
                        if rng.random() < AGE_MISSING_SHARE:
                            age = ""
                        else:
                            age = rng.choices(AGE_TOKENS,
                                              weights=AGE_PROBS)[0]
                        mix = type_mix(year)
                        typ = rng.choices([t for t, _ in mix],
                                          weights=[g for _, g in mix])[0]
                        cell = cells.setdefault((age, typ),
                                                [0] * len(weekly))
                        cell[w] += 1
    return cells_by_prov


def region_of(prov):
    return "05" if prov == "__none__" else PROVINCES[prov][2]


# --- animal weekly counts -----------------------------------------------------------

_animal_cache = {}


def animal_weekly(host, region, year):
    key = (host, region, year)
    if key not in _animal_cache:
        plan = {"1": EQUID_PLAN, "2": TARGET_BIRD_PLAN, "3": WILD_BIRD_PLAN,
                "4": MOSQUITO_PLAN}[host]
        total = plan[region][year]
        T = SEASONS[year][1]
        seed = int(host) * 1_000_003 + int(region) * 101 + year
        counts = simulate_counts(T, total, (total, 0.5, T / 2.2, 1.0),
                                 ("poisson",), seed)
        _animal_cache[key] = counts
    return _animal_cache[key]


_animal_rows_cache = {}


def animal_province_rows(host, year, plan, prov_map, with_species):
    """(prov, week, new, cumulative, species) rows for one animal family."""
    key = (host, year)
    if key in _animal_rows_cache:
        return _animal_rows_cache[key]
    T = SEASONS[year][1]
    rows = []
    for region in sorted(plan):
        if year not in plan[region]:
            continue
        counts = animal_weekly(host, region, year)
        rng = random.Random(int(host) * 7_000_003 + int(region) * 913 + year)
        provinces = prov_map[region]
        quotas = apportion(sum(counts),
                           [(p, 1.0 / len(provinces)) for p in provinces])
        by_prov = split_cases(counts, quotas, rng)
        for prov in sorted(by_prov):
            weekly = by_prov[prov]
            if with_species:
                cells = {}
                for w, c in enumerate(weekly):
                    for _ in range(c):
                        if host == "2":
                            sp = rng.choices(
                                [s for s, _ in TARGET_SPECIES],
                                weights=[g for _, g in TARGET_SPECIES])[0]
                        else:
                            sp = rng.choice(WILD_SPECIES)
                        if host == "3" and year == 2021:
                            sp = ""  # species not reported that season
                        cells.setdefault(sp, [0] * T)[w] += 1
                for sp in sorted(cells):
                    running = 0
                    for w, c in enumerate(cells[sp]):
                        if c:
                            running += c
                            rows.append((prov, w, c, running, sp))
            else:
                running = 0
                for w, c in enumerate(weekly):
                    if c:
                        running += c
                        rows.append((prov, w, c, running, None))
    _animal_rows_cache[key] = rows
    return rows


# --- emission -------------------------------------------------------------------------

HUMAN_REGION_HEADER = ["url_bollettino", "data", "codice_regione",
                       "denominazione_regione", "lat", "long", "nuovi_casi",
                       "casi_totali"]
HUMAN_PROVINCE_HEADER = ["url_bollettino", "data", "codice_regione",
                         "denominazione_regione", "codice_provincia",
                         "denominazione_provincia", "sigla_provincia", "lat",
                         "long", "eta", "nuovi_casi", "casi_totali"]
ANIMAL_HEADER = ["url_bollettino", "data", "codice_regione",
                 "denominazione_regione", "codice_provincia",
                 "denominazione_provincia", "sigla_provincia", "lat", "long",
                 "nuovi_casi", "casi_totali"]


def regional_type_cumulatives(cells_by_prov, year, T):
    """(region, type) -> cumulative list, summing cells across provinces."""
    out = {}
    for (y, prov), cells in cells_by_prov.items():
        if y != year:
            continue
        region = region_of(prov)
        for (age, typ), weekly in cells.items():
            acc = out.setdefault((region, typ), [0] * T)
            for w, c in enumerate(weekly):
                acc[w] += c
    cums = {key: list(np.cumsum(weekly)) for key, weekly in out.items()}
    if year == 2013:
        padded = LAZIO_2013_CUM + [LAZIO_2013_CUM[-1]] * (T - len(
            LAZIO_2013_CUM))
        cums[("12", "neuroinvasive")] = padded
    return cums


def emit_human_files(cells_by_prov, year, year_dir):
    dates = week_dates(year)
    T = len(dates)
    has_type = year >= 2013

    header = list(HUMAN_REGION_HEADER) + (["tipo_infezione"] if has_type
                                          else [])
    rows = []
    cums = regional_type_cumulatives(cells_by_prov, year, T)
    for (region, typ) in sorted(cums):
        cum = cums[(region, typ)]
        diffs = masked_diffs(cum)
        name, lat, lon = REGIONS[region]
        for w in range(T):
            row = [bulletin(year, w), dates[w].isoformat(), region, name,
                   lat, lon, fmt(diffs[w]), cum[w]]
            if has_type:
                row.append(typ)
            rows.append(row)
    write_csv(os.path.join(year_dir, "dati-sorveglianza-umana",
                           f"wn-ita-regioni-sorveglianza-umana-{year}.csv"),
              header, rows)

    header = list(HUMAN_PROVINCE_HEADER) + (["tipo_infezione"] if has_type
                                            else [])
    rows = []
    for (y, prov) in sorted(cells_by_prov):
        if y != year:
            continue
        for (age, typ) in sorted(cells_by_prov[(y, prov)]):
            weekly = cells_by_prov[(y, prov)][(age, typ)]
            running = 0
            emit = []
            for w, c in enumerate(weekly):
                if c:
                    running += c
                    emit.append((w, c, running))
            for w, new, tot in emit:
                region = region_of(prov)
                name = REGIONS[region][0]
                if prov == "__none__":
                    prow = ["", "Not indicated", "", "", ""]
                else:
                    pname, abbrev, _, lat, lon = PROVINCES[prov]
                    prow = [prov, pname, abbrev, lat, lon]
                row = ([bulletin(year, w), dates[w].isoformat(), region, name]
                       + prow + [age, fmt(new), tot])
                if has_type:
                    row.append(typ)
                rows.append(row)
    if year == 2013:
        # the showcase cell: Roma, >=75, neuroinvasive, published cumulative
        diffs = masked_diffs(LAZIO_2013_CUM)
        pname, abbrev, _, lat, lon = PROVINCES["058"]
        for w, cum in enumerate(LAZIO_2013_CUM):
            rows.append([bulletin(year, w), dates[w].isoformat(), "12",
                         REGIONS["12"][0], "058", pname, abbrev, lat, lon,
                         ">=75", fmt(diffs[w]), cum, "neuroinvasive"])
    write_csv(os.path.join(year_dir, "dati-sorveglianza-umana",
                           f"wn-ita-province-sorveglianza-umana-{year}.csv"),
              header, rows)
    return cums


def emit_national_file(year, year_dir, human_cums):
    dates = week_dates(year)
    T = len(dates)
    national = {}
    human = [0] * T
    for cum in human_cums.values():
        for w in range(T):
            human[w] += cum[w]
    national["0"] = human
    if year >= 2017:
        for host, plan, prov_map in (("1", EQUID_PLAN, EQUID_PROVINCES),
                                     ("2", TARGET_BIRD_PLAN, BIRD_PROVINCES),
                                     ("3", WILD_BIRD_PLAN, BIRD_PROVINCES),
                                     ("4", MOSQUITO_PLAN,
                                      MOSQUITO_PROVINCES)):
            weekly = [0] * T
            for region in plan:
                if year not in plan[region]:
                    continue
                for w, c in enumerate(animal_weekly(host, region, year)):
                    weekly[w] += c
            national[host] = list(np.cumsum(weekly))
    rows = []
    for host in sorted(national):
        cum = national[host]
        diffs = masked_diffs(cum)
        for w in range(T):
            rows.append([bulletin(year, w), dates[w].isoformat(), host,
                         fmt(diffs[w]), cum[w]])
    write_csv(os.path.join(year_dir, "dati-andamento-nazionale",
                           f"wn-ita-andamento-nazionale-{year}.csv"),
              ["url_bollettino", "data", "host", "nuovi_casi", "casi_totali"],
              rows)


def emit_animal_files(year, year_dir):
    dates = week_dates(year)

    rows = []
    for prov, w, c, running, _ in animal_province_rows(
            "4", year, MOSQUITO_PLAN, MOSQUITO_PROVINCES, False):
        pname, abbrev, region, lat, lon = PROVINCES[prov]
        rows.append([bulletin(year, w), dates[w].isoformat(), region,
                     REGIONS[region][0], prov, pname, abbrev, lat, lon, c,
                     running])
    write_csv(os.path.join(year_dir, "dati-sorveglianza-entomologica",
                           f"wn-ita-sorveglianza-entomologica-{year}.csv"),
              ANIMAL_HEADER, rows)

    rows = []
    deaths_rng = random.Random(year * 31 + 7)
    death_running = {}
    for prov, w, c, running, _ in animal_province_rows(
            "1", year, EQUID_PLAN, EQUID_PROVINCES, False):
        pname, abbrev, region, lat, lon = PROVINCES[prov]
        new_deaths = sum(1 for _ in range(c) if deaths_rng.random() < 0.12)
        death_running[prov] = death_running.get(prov, 0) + new_deaths
        rows.append([bulletin(year, w), dates[w].isoformat(), region,
                     REGIONS[region][0], prov, pname, abbrev, lat, lon, c,
                     running, new_deaths, death_running[prov],
                     deaths_rng.randint(3, 25)])
    write_csv(os.path.join(year_dir, "dati-sorveglianza-equidi",
                           f"wn-ita-sorveglianza-equidi-{year}.csv"),
              ANIMAL_HEADER + ["nuovi_morti_abbattuti",
                               "totale_morti_abbattuti",
                               "equidi_presenti_focolaio"], rows)

    for host, plan, stem in (("2", TARGET_BIRD_PLAN, "bersaglio"),
                             ("3", WILD_BIRD_PLAN, "selvatici")):
        rows = []
        for prov, w, c, running, sp in animal_province_rows(
                host, year, plan, BIRD_PROVINCES, True):
            pname, abbrev, region, lat, lon = PROVINCES[prov]
            rows.append([bulletin(year, w), dates[w].isoformat(), region,
                         REGIONS[region][0], prov, pname, abbrev, lat, lon,
                         sp, c, running])
        write_csv(
            os.path.join(year_dir, "dati-sorveglianza-uccelli",
                         f"wn-ita-sorveglianza-uccelli-{stem}-{year}.csv"),
            ANIMAL_HEADER[:9] + ["specie", "nuovi_casi", "casi_totali"], rows)


def emit_latest(cells_by_prov):
    host_names = {"0": "umani", "1": "equidi", "2": "uccelli-bersaglio",
                  "3": "uccelli-selvatici", "4": "zanzare"}
    rows = []
    for year in sorted(SEASONS):
        dates = week_dates(year)
        T = len(dates)
        pooled = {}
        for (y, prov), cells in cells_by_prov.items():
            if y != year or prov == "__none__":
                continue
            weekly = pooled.setdefault(prov, [0] * T)
            for cell in cells.values():
                for w, c in enumerate(cell):
                    weekly[w] += c
        for prov in sorted(pooled):
            if year == 2013 and prov == "058":
                cum = LAZIO_2013_CUM
                diffs = masked_diffs(cum)
                emit = [(w, diffs[w], cum[w]) for w in range(len(cum))]
            else:
                emit = []
                running = 0
                for w, c in enumerate(pooled[prov]):
                    if c:
                        running += c
                        emit.append((w, c, running))
            pname, abbrev, region, lat, lon = PROVINCES[prov]
            for w, new, tot in emit:
                rows.append([bulletin(year, w), dates[w].isoformat(), region,
                             REGIONS[region][0], prov, pname, abbrev, lat,
                             lon, fmt(new), tot, host_names["0"]])
        if year >= 2017:
            for host, plan, prov_map in (("1", EQUID_PLAN, EQUID_PROVINCES),
                                         ("2", TARGET_BIRD_PLAN,
                                          BIRD_PROVINCES),
                                         ("3", WILD_BIRD_PLAN,
                                          BIRD_PROVINCES),
                                         ("4", MOSQUITO_PLAN,
                                          MOSQUITO_PROVINCES)):
                weekly_by_prov = {}
                for prov, w, c, _, _ in animal_province_rows(
                        host, year, plan, prov_map, host in ("2", "3")):
                    weekly_by_prov.setdefault(prov, {}).setdefault(w, 0)
                    weekly_by_prov[prov][w] += c
                for prov in sorted(weekly_by_prov):
                    pname, abbrev, region, lat, lon = PROVINCES[prov]
                    running = 0
                    for w in sorted(weekly_by_prov[prov]):
                        c = weekly_by_prov[prov][w]
                        running += c
                        rows.append([bulletin(year, w),
                                     dates[w].isoformat(), region,
                                     REGIONS[region][0], prov, pname, abbrev,
                                     lat, lon, c, running,
                                     host_names[host]])
    write_csv(os.path.join(DB, "latest-wnv.csv"),
              ANIMAL_HEADER[:9] + ["nuovi_casi", "casi_totali",
                                   "ospite_recettivo"], rows)


def emit_weather():
    rng = random.Random(20220607)
    dates = week_dates(2022)
    start = dates[0] - dt.timedelta(days=6)
    day, rows = start, []
    while day <= dates[-1]:
        doy = day.timetuple().tm_yday
        seasonal = 18.0 + 14.0 * math.sin(math.pi * (doy - 120) / 180.0)
        for prov, offset in (("028", 0.0), ("027", -0.8)):
            tmax = round(seasonal + offset + rng.uniform(-3.0, 3.0), 1)
            precip = round(max(0.0, rng.uniform(-6.0, 9.0)), 1)
            wind = round(rng.uniform(4.0, 22.0), 1)
            rows.append([prov, day.isoformat(), tmax, precip, wind])
        day += dt.timedelta(days=1)
    write_csv(os.path.join(ROOT, "weather", "weather-2022.csv"),
              ["codice_provincia", "data", "tmax_c", "precip_mm", "wind_kmh"],
              rows)


def main():
    shutil.rmtree(DB, ignore_errors=True)
    cells_by_prov = build_human_cells()
    for year in sorted(SEASONS):
        year_dir = os.path.join(DB, str(year))
        human_cums = emit_human_files(cells_by_prov, year, year_dir)
        emit_national_file(year, year_dir, human_cums)
        if year >= 2017:
            emit_animal_files(year, year_dir)
    emit_latest(cells_by_prov)
    emit_weather()

    total = sum(sum(v.values()) for v in HUMAN_REGION_YEAR.values())
    print(f"snapshot written to {DB} (human counted total {total})")


if __name__ == "__main__":
    main()
