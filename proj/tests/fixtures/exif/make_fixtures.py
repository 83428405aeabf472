"""Writes the EXIF test images and freezes what Pillow reads back from them.

The APP1 payload is assembled by hand with struct so the byte order is under
our control; Pillow then acts as the independent reader. Run from this
directory: python3 make_fixtures.py
"""
import io
import json
import struct

from PIL import Image

MAKE = "Canon"
MODEL = "Canon EOS 5D"
DATETIME = "2021:07:27 10:15:30"
LAT = ((41, 1), (53, 1), (247, 10))   # 41 53' 24.7" N
LON = ((12, 1), (29, 1), (321, 10))   # 12 29' 32.1" E


def base_jpeg():
    buf = io.BytesIO()
    Image.new("RGB", (8, 8), (40, 90, 160)).save(buf, "JPEG")
    return buf.getvalue()


class Ifd:
    def __init__(self):
        self.entries = []  # (tag, type, count, payload bytes)

    def ascii(self, tag, text):
        data = text.encode() + b"\0"
        self.entries.append((tag, 2, len(data), data))

    def long(self, tag, value, bo):
        self.entries.append((tag, 4, 1, struct.pack(bo + "I", value)))

    def rationals(self, tag, values, bo):
        data = b"".join(struct.pack(bo + "II", n, d) for n, d in values)
        self.entries.append((tag, 5, len(values), data))

    def size(self):
        return 2 + 12 * len(self.entries) + 4 + sum(len(p) for *_, p in self.entries if len(p) > 4)

    def encode(self, offset, bo):
        head = struct.pack(bo + "H", len(self.entries))
        extra = b""
        extra_at = offset + 2 + 12 * len(self.entries) + 4
        for tag, typ, count, payload in sorted(self.entries):
            if len(payload) <= 4:
                value = payload.ljust(4, b"\0")
            else:
                value = struct.pack(bo + "I", extra_at + len(extra))
                extra += payload
            head += struct.pack(bo + "HHI", tag, typ, count) + value
        return head + struct.pack(bo + "I", 0) + extra


def tiff(bo, with_gps=True, with_camera=True):
    ifd0, exif, gps = Ifd(), Ifd(), Ifd()
    exif.ascii(0x9003, DATETIME)
    if with_gps:
        gps.ascii(1, "N")
        gps.rationals(2, LAT, bo)
        gps.ascii(3, "E")
        gps.rationals(4, LON, bo)
    if with_camera:
        ifd0.ascii(0x010F, MAKE)
        ifd0.ascii(0x0110, MODEL)
    # pointers are filled in once the layout is known
    ifd0.long(0x8769, 0, bo)
    if with_gps:
        ifd0.long(0x8825, 0, bo)
    ifd0_at = 8
    exif_at = ifd0_at + ifd0.size()
    gps_at = exif_at + exif.size()
    ifd0.entries = [(t, ty, c, struct.pack(bo + "I", exif_at) if t == 0x8769 else
                     struct.pack(bo + "I", gps_at) if t == 0x8825 else p)
                    for t, ty, c, p in ifd0.entries]
    magic = b"II" if bo == "<" else b"MM"
    out = magic + struct.pack(bo + "HI", 42, ifd0_at) + ifd0.encode(ifd0_at, bo) + exif.encode(exif_at, bo)
    if with_gps:
        out += gps.encode(gps_at, bo)
    return out


def with_app1(jpeg, tiff_bytes):
    body = b"Exif\0\0" + tiff_bytes
    segment = b"\xff\xe1" + struct.pack(">H", len(body) + 2) + body
    return jpeg[:2] + segment + jpeg[2:]


def pillow_record(path):
    img = Image.open(path)
    exif = img.getexif()
    rec = {}
    dt = exif.get_ifd(0x8769).get(0x9003)
    if dt:
        rec["datetime_original"] = dt.replace(":", "-", 2).replace(" ", "T")
    gps = exif.get_ifd(0x8825)
    if gps:
        def deg(v, ref, neg):
            d = float(v[0]) + float(v[1]) / 60 + float(v[2]) / 3600
            return -d if ref == neg else d
        rec["lat"] = deg(gps[2], gps[1], "S")
        rec["lon"] = deg(gps[4], gps[3], "W")
    if exif.get(0x010F):
        rec["make"] = exif[0x010F]
    if exif.get(0x0110):
        rec["model"] = exif[0x0110]
    return rec


def main():
    jpeg = base_jpeg()
    files = {
        "gps_ii.jpg": with_app1(jpeg, tiff("<")),
        "gps_mm.jpg": with_app1(jpeg, tiff(">")),
        "date_only.jpg": with_app1(jpeg, tiff("<", with_gps=False, with_camera=False)),
        "no_exif.jpg": jpeg,
    }
    for name, data in files.items():
        with open(name, "wb") as f:
            f.write(data)
    frozen = {name: pillow_record(name) for name in files}
    with open("expected.json", "w") as f:
        json.dump(frozen, f, indent=2, sort_keys=True)
        f.write("\n")


if __name__ == "__main__":
    main()
