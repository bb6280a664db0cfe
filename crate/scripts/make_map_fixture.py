#!/usr/bin/env python3
"""Generate the bundled city-map fixture and its count manifest.

Builds a small Bengaluru-like GeoJSON extract (road grid, lake, stream,
railway, pedestrian areas, parks, a few unclassifiable buildings) and
independently computes the numbers the Rust tests check against:

  - feature count per class (same tag precedence as the library)
  - dropped (unclassifiable) feature count
  - road graph node/edge counts after 1e-7 degree vertex merging and
    largest-connected-component filtering
  - densified point count at 25 m spacing

The counting code here is deliberately separate from the Rust
implementation so the manifest works as an independent oracle.
"""

import json
import math
import os
import random

EARTH_RADIUS_M = 6_371_008.8
MERGE_QUANTUM = 1e-7
DENSIFY_SPACING_M = 25.0

OUT_DIR = os.path.join(os.path.dirname(__file__), "..", "crates", "lastmile", "fixtures")


def haversine_m(a, b):
    """Great-circle distance in meters between (lat, lon) pairs."""
    lat1, lon1, lat2, lon2 = map(math.radians, (a[0], a[1], b[0], b[1]))
    dlat = lat2 - lat1
    dlon = lon2 - lon1
    h = math.sin(dlat / 2) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin(dlon / 2) ** 2
    return 2.0 * EARTH_RADIUS_M * math.asin(min(1.0, math.sqrt(h)))


def classify(tags):
    """Tag precedence: Water > Railway > Pedestrian > ParkForest > Road."""
    if tags.get("natural") == "water" or "waterway" in tags:
        return "water"
    if "railway" in tags:
        return "railway"
    if tags.get("highway") in ("pedestrian", "footway") or tags.get("area") == "pedestrian":
        return "pedestrian"
    if tags.get("leisure") == "park" or tags.get("landuse") == "forest" or tags.get("natural") == "wood":
        return "park_forest"
    if "highway" in tags:
        return "road"
    return None


def line(fid, coords, tags):
    return {
        "type": "Feature",
        "id": fid,
        "properties": tags,
        "geometry": {"type": "LineString", "coordinates": [[lon, lat] for lat, lon in coords]},
    }


def polygon(fid, ring, tags):
    closed = ring + [ring[0]]
    return {
        "type": "Feature",
        "id": fid,
        "properties": tags,
        "geometry": {"type": "Polygon", "coordinates": [[[lon, lat] for lat, lon in closed]]},
    }


def build_features():
    rng = random.Random(20250810)
    features = []

    lat0, lon0 = 12.960, 77.580
    step = 0.002
    n_ns, n_ew = 15, 13  # north-south lines x east-west lines

    # Road grid: every vertex sits on the shared lattice so junctions merge.
    for k in range(n_ns):
        lon = round(lon0 + step * k, 7)
        coords = [(round(lat0 + step * j, 7), lon) for j in range(n_ew)]
        features.append(line(f"way/ns{k:02d}", coords, {"highway": "residential", "name": f"Cross {k}"}))
    for j in range(n_ew):
        lat = round(lat0 + step * j, 7)
        coords = [(lat, round(lon0 + step * k, 7)) for k in range(n_ns)]
        features.append(line(f"way/ew{j:02d}", coords, {"highway": "residential", "name": f"Main {j}"}))

    # Two diagonal avenues through lattice junctions.
    diag1 = [(round(lat0 + step * t, 7), round(lon0 + step * t, 7)) for t in range(n_ew)]
    features.append(line("way/diag-sw-ne", diag1, {"highway": "secondary", "name": "Hosur Diagonal"}))
    diag2 = [(round(lat0 + step * t, 7), round(lon0 + step * (14 - t), 7)) for t in range(n_ew)]
    features.append(line("way/diag-se-nw", diag2, {"highway": "secondary", "name": "Tank Bund Diagonal"}))

    # Disconnected service stub south-east of the grid (drops out as a
    # minor component).
    stub = [(12.9585, 77.6103), (12.9591, 77.6114), (12.9598, 77.6123)]
    features.append(line("way/stub", stub, {"highway": "service"}))

    # Lake across a few blocks plus a stream meandering south-north.
    lake_c = (12.9680, 77.5945)
    lake = []
    for i in range(14):
        ang = 2 * math.pi * i / 14
        r_lat = 0.0022 * (1.0 + 0.12 * math.sin(3 * ang + 0.7))
        r_lon = 0.0027 * (1.0 + 0.10 * math.cos(2 * ang))
        lake.append((round(lake_c[0] + r_lat * math.sin(ang), 7), round(lake_c[1] + r_lon * math.cos(ang), 7)))
    features.append(polygon("way/lake", lake, {"natural": "water", "name": "Sampangi Lake"}))

    stream = []
    for j in range(n_ew):
        wobble = 0.0004 * math.sin(1.3 * j) + 0.0002 * math.cos(2.1 * j)
        stream.append((round(lat0 - 0.0008 + step * j + 0.0003, 7), round(77.6008 + wobble, 7)))
    features.append(line("way/stream", stream, {"waterway": "stream", "name": "Vrishabhavathi"}))

    # Railway main line crossing every north-south street, plus a spur.
    rail = []
    for k in range(11):
        lon = round(77.5790 + 0.003 * k, 7)
        rail.append((round(12.9752 + 0.0002 * math.sin(0.9 * k), 7), lon))
    features.append(line("way/rail-main", rail, {"railway": "rail", "name": "Mysuru Line"}))
    spur = [(12.9752, 77.5930), (12.9790, 77.5966), (12.9826, 77.6004), (12.9838, 77.6042)]
    features.append(line("way/rail-spur", spur, {"railway": "rail", "service": "spur"}))

    # Pedestrian plaza over a junction and two footways.
    pc = (12.9700, 77.5980)
    plaza = [
        (pc[0] - 0.0007, pc[1] - 0.0008), (pc[0] - 0.0008, pc[1] + 0.0007),
        (pc[0] + 0.0006, pc[1] + 0.0008), (pc[0] + 0.0008, pc[1] - 0.0006),
    ]
    plaza = [(round(a, 7), round(b, 7)) for a, b in plaza]
    features.append(polygon("way/plaza", plaza, {"highway": "pedestrian", "name": "Gandhi Bazaar Plaza"}))
    features.append(line(
        "way/footway-park",
        [(12.9762, 77.5818), (12.9781, 77.5842), (12.9799, 77.5861)],
        {"highway": "footway"},
    ))
    features.append(line(
        "way/footway-lake",
        [(12.9662, 77.5912), (12.9655, 77.5936), (12.9661, 77.5961)],
        {"highway": "footway"},
    ))

    # Parks and woodland over whole blocks so routes run through them.
    park = [(12.9770, 77.5874), (12.9770, 77.5966), (12.9816, 77.5966), (12.9816, 77.5874)]
    features.append(polygon("way/park", park, {"leisure": "park", "name": "Lalbagh West"}))
    forest = [(12.9604, 77.6024), (12.9604, 77.6076), (12.9646, 77.6076), (12.9646, 77.6024)]
    features.append(polygon("way/forest", forest, {"landuse": "forest"}))
    wood = [(12.9712, 77.6031), (12.9712, 77.6059), (12.9736, 77.6059), (12.9736, 77.6031)]
    features.append(polygon("way/wood", wood, {"natural": "wood"}))

    # Unclassifiable features the loader must drop (and count).
    for i, (blat, blon) in enumerate([(12.9627, 77.5853), (12.9745, 77.5991), (12.9807, 77.6013)]):
        sq = [(blat, blon), (blat, blon + 0.0004), (blat + 0.0004, blon + 0.0004), (blat + 0.0004, blon)]
        features.append(polygon(f"way/bldg{i}", sq, {"building": "yes"}))

    rng.shuffle(features)  # file order should not encode construction order
    return features


def feature_points(feat):
    geom = feat["geometry"]
    if geom["type"] == "LineString":
        return [(lat, lon) for lon, lat in geom["coordinates"]]
    return [(lat, lon) for lon, lat in geom["coordinates"][0]]


def quantize(pt):
    return (math.floor(pt[0] * 1e7 + 0.5), math.floor(pt[1] * 1e7 + 0.5))


def road_graph_counts(features):
    """Merge vertices within 1e-7 deg, keep the largest component."""
    node_ids = {}
    points = []
    edges = set()
    for feat in features:
        if classify(feat["properties"]) != "road":
            continue
        if feat["geometry"]["type"] != "LineString":
            continue
        pts = feature_points(feat)
        prev = None
        for pt in pts:
            q = quantize(pt)
            if q not in node_ids:
                node_ids[q] = len(points)
                points.append(pt)
            cur = node_ids[q]
            if prev is not None and prev != cur:
                edges.add((min(prev, cur), max(prev, cur)))
            prev = cur

    adj = {i: [] for i in range(len(points))}
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)

    seen = set()
    components = []
    for start in range(len(points)):
        if start in seen:
            continue
        stack, comp = [start], set()
        while stack:
            n = stack.pop()
            if n in comp:
                continue
            comp.add(n)
            stack.extend(m for m in adj[n] if m not in comp)
        seen |= comp
        components.append(comp)
    components.sort(key=len, reverse=True)
    largest = components[0]
    kept_edges = [e for e in edges if e[0] in largest]
    return {
        "nodes": len(largest),
        "edges": len(kept_edges),
        "component_sizes": sorted((len(c) for c in components), reverse=True),
    }


def densify_count(features, spacing):
    total = 0
    for feat in features:
        if classify(feat["properties"]) != "road":
            continue
        if feat["geometry"]["type"] != "LineString":
            continue
        pts = feature_points(feat)
        count = 1
        for a, b in zip(pts, pts[1:]):
            length = haversine_m(a, b)
            pieces = max(1, math.ceil(length / spacing))
            # guard against a ceil() knife edge between implementations
            frac = abs(length / spacing - round(length / spacing))
            assert frac > 1e-6, f"segment length {length} too close to a spacing multiple"
            count += pieces
        total += count
    return total


def main():
    features = build_features()
    collection = {"type": "FeatureCollection", "features": features}

    classes = {}
    dropped = 0
    for feat in features:
        cls = classify(feat["properties"])
        if cls is None:
            dropped += 1
        else:
            classes[cls] = classes.get(cls, 0) + 1

    graph = road_graph_counts(features)
    manifest = {
        "classes": classes,
        "dropped": dropped,
        "road_graph": {"nodes": graph["nodes"], "edges": graph["edges"]},
        "densify": {"spacing_m": DENSIFY_SPACING_M, "points": densify_count(features, DENSIFY_SPACING_M)},
    }

    os.makedirs(OUT_DIR, exist_ok=True)
    with open(os.path.join(OUT_DIR, "blr_extract.geojson"), "w") as f:
        json.dump(collection, f, separators=(",", ":"))
        f.write("\n")
    with open(os.path.join(OUT_DIR, "manifest.json"), "w") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write("\n")

    print("features:", len(features))
    print("manifest:", json.dumps(manifest))
    print("component sizes:", graph["component_sizes"])


if __name__ == "__main__":
    main()
