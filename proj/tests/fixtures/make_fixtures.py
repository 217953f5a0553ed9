#!/usr/bin/env python3
"""Regenerates the bundled fixture set. Output is committed; rerun only to change it.

    python3 tests/fixtures/make_fixtures.py
"""
import hashlib
import io
import json
import random
import shutil
from pathlib import Path

from PIL import Image, ImageDraw

HERE = Path(__file__).resolve().parent
SITE = "http://fixture.example/"
W, H = 160, 120


def cam_url(name):
    return f"{SITE}cams/{name}.jpg"


def cam_id(url):
    # canonical form of these URLs is the URL itself
    return hashlib.sha256(url.encode()).hexdigest()


def scene(rng, base, shift):
    img = Image.new("RGB", (W, H), base)
    d = ImageDraw.Draw(img)
    for _ in range(6):
        x, y = rng.randrange(W - 20), rng.randrange(H - 30)
        d.rectangle([x + shift, y, x + shift + 12, y + 28], fill=(rng.randrange(256), rng.randrange(256), rng.randrange(256)))
    return img


def jpeg(img, quality=85, optimize=False):
    buf = io.BytesIO()
    img.save(buf, "JPEG", quality=quality, optimize=optimize)
    return buf.getvalue()


def write(path, data):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(data if isinstance(data, bytes) else data.encode())


def make_site(rng):
    root = HERE / "site"
    shutil.rmtree(root, ignore_errors=True)
    write(root / "index.html", """<!doctype html>
<html><head><title>Fixture town webcams</title></head>
<body>
<h1>Town cameras</h1>
<img src="logo.png" alt="logo">
<p><a href="page2.html">More cameras</a> <a href="mailto:ops@fixture.example">contact</a></p>
<div class="cam"><img src="cams/plaza.jpg" alt="plaza"></div>
<div class="cam"><img data-src="/cams/lobby.jpg"></div>
<!-- <img src="cams/retired.jpg"> -->
</body></html>
""")
    write(root / "page2.html", """<html><body>
<a href="/index.html">home</a>
<img src="/cams/highway.jpg">
<img src='cams/pier.jpg'>
<a href="http://elsewhere.example/cams.html">partner site</a>
</body></html>
""")
    logo = Image.new("RGB", (32, 16), (20, 60, 200))
    buf = io.BytesIO()
    logo.save(buf, "PNG")
    write(root / "logo.png", buf.getvalue())
    for name, base in (("plaza", (120, 120, 110)), ("highway", (70, 70, 75)), ("pier", (90, 140, 190))):
        for k in range(3):
            write(root / "cams" / f"{name}.jpg" / f"{k:03d}.jpg", jpeg(scene(rng, base, 8 * k)))
    # a static scene served with varying encoder settings: bytes change, pixels do not
    lobby = scene(random.Random(7), (200, 190, 170), 0)
    write(root / "cams" / "lobby.jpg" / "000.jpg", jpeg(lobby))
    write(root / "cams" / "lobby.jpg" / "001.jpg", jpeg(lobby, optimize=True))
    write(root / "cams" / "lobby.jpg" / "002.jpg", jpeg(lobby))
    write(HERE / "seeds.txt", "# fixture site\n" + SITE + "\n")


DAYS = ["2020-03-01", "2020-03-02", "2020-03-03", "2020-03-04"]
TIMES = ["013012", "055940", "102233", "151005", "203318"]


def make_archive(rng):
    root = HERE / "archive"
    shutil.rmtree(root, ignore_errors=True)
    captures = []
    for name, base, days in (("plaza", (120, 120, 110), DAYS), ("highway", (70, 70, 75), DAYS)):
        cid = cam_id(cam_url(name))
        for d in days:
            for t in TIMES:
                write(root / cid / d / f"{t}.jpg", jpeg(scene(rng, base, rng.randrange(20))))
                captures.append((name, cid, d, t))
    frozen = jpeg(scene(random.Random(3), (90, 140, 190), 0))
    cid = cam_id(cam_url("pier"))
    for d in DAYS[:2]:
        for t in TIMES:
            write(root / cid / d / f"{t}.jpg", frozen)
            captures.append(("pier", cid, d, t))
    return captures


def person(rng, x=None, y=None, h=None):
    h = h or rng.uniform(24, 40)
    w = h * 0.4
    x = rng.uniform(0, W - w) if x is None else x
    y = rng.uniform(0, H - h) if y is None else y
    return [round(x, 2), round(y, 2), round(min(x + w, W), 2), round(min(y + h, H), 2)]


def make_detections(rng, captures):
    out = HERE / "detections"
    shutil.rmtree(out, ignore_errors=True)
    for name in ("plaza", "highway", "pier"):
        lines = []
        for cam, cid, d, t in captures:
            if cam != name:
                continue
            dets = []
            night = t in ("013012", "203318")
            if name in ("plaza", "pier"):
                n = 0 if night else rng.randrange(1, 6)
                for _ in range(n):
                    dets.append({"class": "person", "confidence": round(rng.uniform(0.35, 0.99), 3), "box": person(rng)})
                if n >= 2 and rng.random() < 0.7:
                    # a close pair of similar size
                    bx = person(rng, h=32)
                    dets.append({"class": "person", "confidence": 0.9, "box": bx})
                    dets.append({"class": "person", "confidence": 0.8,
                                 "box": [round(min(bx[0] + 6, W - 13), 2), bx[1], round(min(bx[0] + 6 + 12.8, W), 2), bx[3]]})
                dets.append({"class": "bicycle", "confidence": 0.7, "box": person(rng)})
            else:
                for _ in range(rng.randrange(2, 9) if not night else 1):
                    x, y = rng.uniform(0, W - 30), rng.uniform(0, H - 15)
                    dets.append({"class": rng.choice(["car", "car", "truck", "bus", "Motorcycle"]),
                                 "confidence": round(rng.uniform(0.4, 0.99), 3),
                                 "box": [round(x, 2), round(y, 2), round(x + 30, 2), round(y + 15, 2)]})
                dets.append({"class": "person", "confidence": 0.6, "box": person(rng)})
            dets.append({"class": "person", "confidence": 0.12, "box": person(rng)})  # below the cut
            lines.append({"camera_id": cid, "captured_at": f"{d}T{t[:2]}:{t[2:4]}:{t[4:]}Z",
                          "image_width": W, "image_height": H, "source": {"kind": "still"}, "detections": dets})
        write(out / f"{name}.jsonl", "".join(json.dumps(r, separators=(",", ":")) + "\n" for r in lines))


def make_tables():
    ids = {n: cam_id(cam_url(n)) for n in ("plaza", "highway", "pier")}
    scenes = [
        (ids["plaza"], [("plaza", 0.61), ("crosswalk", 0.55), ("plaza", 0.72), ("street", 0.4), ("plaza", 0.5)]),
        (ids["highway"], [("highway", 0.8), ("highway", 0.77), ("road", 0.6), ("highway", 0.9), ("highway", 0.85)]),
        (ids["pier"], [("pier", 0.7), ("boardwalk", 0.66), ("pier", 0.58), ("boardwalk", 0.81), ("harbor", 0.3)]),
    ]
    write(HERE / "scenes.jsonl", "".join(
        json.dumps({"camera_id": c, "labels": [{"scene": s, "confidence": p} for s, p in ls]}, separators=(",", ":")) + "\n"
        for c, ls in scenes))
    write(HERE / "regions.csv", "camera_id,country,state,city\n"
          f"{ids['plaza']},US,IN,Indianapolis\n{ids['highway']},US,IN,Lafayette\n{ids['pier']},GB,,London\n")
    write(HERE / "phases.csv", "start_date,label\n2020-03-01,before\n2020-03-03,after\n")
    config = {
        "seeds": "seeds.txt",
        "archive_root": "archive",
        "region_map": "regions.csv",
        "phase_labels": "phases.csv",
        "captures_per_day": 5,
        "schedule_seed": 2020,
        "crawl": {"max_pages": 20, "max_depth": 2, "per_host_delay_ms": 0, "workers": 2},
        "liveness": {"min_percent": 0.001, "min_luminance": 1.0, "samples": 3, "spacing_seconds": 10},
        "distancing": {"assumed_height_ft": 5.4, "distance_ft": 6.0},
        "detection": {"confidence_threshold": 0.3},
        "scenes": {"people": ["plaza", "crosswalk", "street", "pier", "boardwalk", "beach", "park"],
                   "vehicles": ["highway", "road"]},
        "presentation": {"min_people": 7, "min_vehicles": 8},
    }
    write(HERE / "config.json", json.dumps(config, indent=2) + "\n")


def main():
    rng = random.Random(20200301)
    make_site(rng)
    captures = make_archive(rng)
    make_detections(rng, captures)
    make_tables()


if __name__ == "__main__":
    main()
