#!/usr/bin/env python3
"""Writes the toy coastline fixture under fixtures/toy/.

Five tracts on a strip of coast near (-95.0, 29.5), three facilities and
two flood maps. The 2050 map holds every 2018 point plus a channel that
reaches the NPL site, so exactly one more facility floods in 2050.
"""
import json
import math
import random
from pathlib import Path

OUT = Path(__file__).resolve().parent / "toy"
R = 6371007.181


def offset(lon, lat, east_m, north_m):
    dlat = math.degrees(north_m / R)
    dlon = math.degrees(east_m / (R * math.cos(math.radians(lat))))
    return lon + dlon, lat + dlat


def rect(x0, y0, x1, y1):
    return [[x0, y0], [x1, y0], [x1, y1], [x0, y1], [x0, y0]]


TRACTS = [
    ("48167000100", {"type": "Polygon", "coordinates": [rect(-95.10, 29.45, -95.06, 29.49)]},
     4210, 31250, 0.42, 0.11, 0.025, 0.09),
    ("48167000200", {"type": "Polygon", "coordinates": [[[-95.06, 29.45], [-95.02, 29.45], [-95.02, 29.48],
                                                       [-95.06, 29.49], [-95.06, 29.45]]]},
     5875, 22410, 0.71, 0.23, 0.041, 0.18),
    ("48167000300", {"type": "Polygon", "coordinates": [rect(-95.02, 29.45, -94.98, 29.49),
                                                       # lake, written clockwise
                                                       [[-95.005, 29.465], [-95.005, 29.475], [-94.995, 29.475],
                                                        [-94.995, 29.465], [-95.005, 29.465]]]},
     3390, 27800, 0.55, 0.16, 0.030, 0.13),
    ("48167000400", {"type": "MultiPolygon", "coordinates": [
        [rect(-95.10, 29.49, -95.04, 29.52)],
        [[[-95.08, 29.43], [-95.06, 29.43], [-95.07, 29.44], [-95.08, 29.43]]]]},
     6120, 35900, 0.38, 0.08, 0.022, 0.07),
    ("48167000500", {"type": "Polygon", "coordinates": [rect(-94.90, 29.55, -94.86, 29.59)]},
     2745, 41200, 0.29, 0.06, 0.019, 0.05),
]

FACILITIES = [
    ("F001", "Bayport Chemical Terminal", "TRI", -95.05, 29.46),
    ("F002", "Old Refinery Site", "NPL", -95.00, 29.50),
    ("F003", "Upland Works", "INDUSTRIAL", -94.93, 29.53),
]


def main():
    OUT.mkdir(exist_ok=True)
    features = []
    for geoid, geom, pop, income, pm, pp, pu, pd in TRACTS:
        features.append({"type": "Feature", "properties": {
            "GEOID": geoid, "total_pop": pop, "per_capita_income": income, "p_minority": pm,
            "p_poverty": pp, "p_unemployed": pu, "p_no_diploma": pd}, "geometry": geom})
    (OUT / "tracts.geojson").write_text(json.dumps({"type": "FeatureCollection", "features": features}, indent=1) + "\n")

    with open(OUT / "facilities.csv", "w", newline="\n") as f:
        f.write("id,name,kind,lon,lat\n")
        for row in FACILITIES:
            f.write("%s,%s,%s,%.6f,%.6f\n" % row)

    rng = random.Random(2018)
    current = []
    # Shoreline south of the tracts.
    for i in range(570):
        lon = -95.12 + i * 0.16 / 569
        lat = 29.44 + 0.002 * math.sin(i / 15.0)
        current.append((lon, lat, round(rng.uniform(0.0, 2.5), 3) if i % 50 else 0.0))
    # Ponding around the TRI terminal, 60 m to 140 m away.
    for k in range(30):
        ang = 2 * math.pi * k / 30
        d = 60 + 80 * (k % 5) / 4
        lon, lat = offset(-95.05, 29.46, d * math.cos(ang), d * math.sin(ang))
        current.append((lon, lat, round(rng.uniform(0.1, 1.2), 3)))
    future = list(current)
    # Channel from the shore up to 100 m south of the NPL site.
    n_extra = 1000 - len(future)
    _, top = offset(-95.00, 29.50, 0.0, -100.0)
    for k in range(n_extra):
        t = k / (n_extra - 1)
        lat = 29.44 + t * (top - 29.44)
        lon = -95.00 + 0.0008 * math.sin(7 * t) * (1 - t)
        future.append((lon, lat, round(rng.uniform(0.2, 3.0), 3)))
    for name, pts in (("flood_2018.csv", current), ("flood_2050.csv", future)):
        with open(OUT / name, "w", newline="\n") as f:
            f.write("lon,lat,depth_m\n")
            for lon, lat, depth in pts:
                f.write("%.7f,%.7f,%.3f\n" % (lon, lat, depth))

    bad = [("B%03d" % i, "Plant %d" % i, ["TRI", "npl", "Industrial"][i % 3], -95.0 + 0.01 * i, 29.4 + 0.01 * i)
           for i in range(1, 11)]
    with open(OUT.parent / "facilities_bad_lat.csv", "w", newline="\n") as f:
        f.write("id,name,kind,lon,lat\n")
        for i, (fid, name, kind, lon, lat) in enumerate(bad, start=1):
            if i == 7:
                lat = 95.0
            f.write("%s,%s,%s,%.4f,%.4f\n" % (fid, name, kind, lon, lat))


if __name__ == "__main__":
    main()
