"""Zip-code geography: enrichment lookups, boundary centroids, distances."""

from __future__ import annotations

import csv
import io
import json
import math
import re
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping, Optional, Protocol

import httpx

from .errors import GeocoderError

EARTH_RADIUS_KM = 6371.0

# NYC extent used to validate zip centroids on load
LAT_RANGE = (40.4, 41.0)
LON_RANGE = (-74.3, -73.6)

ZIP_RE = re.compile(r"^[0-9]{5}$")


class Borough(str, Enum):
    BRONX = "Bronx"
    BROOKLYN = "Brooklyn"
    MANHATTAN = "Manhattan"
    QUEENS = "Queens"
    STATEN_ISLAND = "StatenIsland"


@dataclass(frozen=True)
class ZipInfo:
    zip: str
    borough: Borough
    centroid_lat: float
    centroid_lon: float
    population: int

    def __post_init__(self) -> None:
        if not ZIP_RE.match(self.zip):
            raise ValueError(f"invalid zip code: {self.zip!r}")
        if not (LAT_RANGE[0] <= self.centroid_lat <= LAT_RANGE[1]):
            raise ValueError(f"zip {self.zip}: centroid_lat {self.centroid_lat} outside NYC extent")
        if not (LON_RANGE[0] <= self.centroid_lon <= LON_RANGE[1]):
            raise ValueError(f"zip {self.zip}: centroid_lon {self.centroid_lon} outside NYC extent")
        if self.population < 0:
            raise ValueError(f"zip {self.zip}: negative population")


def load_zip_table(path: str | Path) -> dict[str, ZipInfo]:
    """Load the `zip,borough,centroid_lat,centroid_lon,population` CSV."""
    with open(path, newline="", encoding="utf-8") as fh:
        return parse_zip_table(fh.read())


def parse_zip_table(text: str) -> dict[str, ZipInfo]:
    reader = csv.DictReader(io.StringIO(text))
    table: dict[str, ZipInfo] = {}
    for row in reader:
        info = ZipInfo(
            zip=row["zip"].strip(),
            borough=Borough(row["borough"].strip()),
            centroid_lat=float(row["centroid_lat"]),
            centroid_lon=float(row["centroid_lon"]),
            population=int(row["population"]),
        )
        if info.zip in table:
            raise ValueError(f"duplicate zip in table: {info.zip}")
        table[info.zip] = info
    return table


class GeocoderContract(Protocol):
    """resolve() returns the zip record for an address, or None when the
    address is unknown. Backend failures raise GeocoderError instead."""

    def resolve(self, address: str) -> Optional[ZipInfo]: ...


class OfflineGeocoder:
    """Exact-match address table backed by an `address,zip` CSV."""

    def __init__(self, address_to_zip: Mapping[str, str], zip_table: Mapping[str, ZipInfo]):
        self._addresses = dict(address_to_zip)
        self._zips = zip_table

    @classmethod
    def from_csv(cls, path: str | Path, zip_table: Mapping[str, ZipInfo]) -> "OfflineGeocoder":
        mapping: dict[str, str] = {}
        with open(path, newline="", encoding="utf-8") as fh:
            for row in csv.DictReader(fh):
                mapping[row["address"]] = row["zip"].strip()
        return cls(mapping, zip_table)

    def resolve(self, address: str) -> Optional[ZipInfo]:
        if not address:
            raise ValueError("address must be non-empty")
        zip_code = self._addresses.get(address)
        if zip_code is None:
            return None
        return self._zips.get(zip_code)


class HttpGeocoder:
    """Remote geocoder adapter: GET <base_url>?address=... returning
    {"zip": "10001"} or HTTP 404 for unknown addresses."""

    def __init__(
        self,
        base_url: str,
        zip_table: Mapping[str, ZipInfo],
        timeout: float = 10.0,
        client: Optional[httpx.Client] = None,
    ):
        self._base_url = base_url
        self._zips = zip_table
        self._timeout = timeout
        self._client = client

    def resolve(self, address: str) -> Optional[ZipInfo]:
        if not address:
            raise ValueError("address must be non-empty")
        try:
            if self._client is not None:
                resp = self._client.get(self._base_url, params={"address": address})
            else:
                resp = httpx.get(self._base_url, params={"address": address}, timeout=self._timeout)
        except httpx.HTTPError as exc:
            raise GeocoderError(f"geocoder request failed: {exc}") from exc
        if resp.status_code == 404:
            return None
        if resp.status_code != 200:
            raise GeocoderError(f"geocoder returned HTTP {resp.status_code}")
        try:
            zip_code = resp.json()["zip"]
        except (KeyError, ValueError) as exc:
            raise GeocoderError(f"geocoder returned malformed payload: {exc}") from exc
        return self._zips.get(str(zip_code))


def resolve_address(address: str, geocoder: GeocoderContract) -> Optional[ZipInfo]:
    """Resolve an address through any geocoder honoring the contract."""
    if not address:
        raise ValueError("address must be non-empty")
    return geocoder.resolve(address)


def load_boundaries(path: str | Path) -> dict[str, list[tuple[float, float]]]:
    """Load zip boundary vertices from a GeoJSON FeatureCollection.

    Each feature carries a `zip` property and a Polygon or MultiPolygon
    geometry. Only exterior rings are kept; the GeoJSON closing vertex
    (first == last) is dropped so vertices are not double counted.
    """
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    boundaries: dict[str, list[tuple[float, float]]] = {}
    for feature in doc.get("features", []):
        zip_code = str(feature["properties"]["zip"])
        geom = feature["geometry"]
        if geom["type"] == "Polygon":
            polygons = [geom["coordinates"]]
        elif geom["type"] == "MultiPolygon":
            polygons = geom["coordinates"]
        else:
            raise ValueError(f"zip {zip_code}: unsupported geometry {geom['type']}")
        vertices: list[tuple[float, float]] = []
        for rings in polygons:
            exterior = rings[0]
            if len(exterior) > 1 and exterior[0] == exterior[-1]:
                exterior = exterior[:-1]
            # GeoJSON positions are [lon, lat]
            vertices.extend((float(lat), float(lon)) for lon, lat in exterior)
        boundaries[zip_code] = vertices
    return boundaries


def zip_centroid(zip_code: str, boundary_table: Mapping[str, Iterable[tuple[float, float]]]) -> tuple[float, float]:
    """Arithmetic mean of the zip's boundary vertices (not area centroid)."""
    try:
        vertices = list(boundary_table[zip_code])
    except KeyError:
        raise KeyError(f"zip {zip_code} not present in boundary table") from None
    if not vertices:
        raise ValueError(f"zip {zip_code} has an empty boundary")
    lat = sum(v[0] for v in vertices) / len(vertices)
    lon = sum(v[1] for v in vertices) / len(vertices)
    return (lat, lon)


def haversine_km(p1: tuple[float, float], p2: tuple[float, float]) -> float:
    """Great-circle distance in kilometers between two (lat, lon) points."""
    lat1, lon1 = math.radians(p1[0]), math.radians(p1[1])
    lat2, lon2 = math.radians(p2[0]), math.radians(p2[1])
    sin_dlat = math.sin((lat2 - lat1) * 0.5)
    sin_dlon = math.sin((lon2 - lon1) * 0.5)
    h = sin_dlat * sin_dlat + math.cos(lat1) * math.cos(lat2) * sin_dlon * sin_dlon
    return 2.0 * EARTH_RADIUS_KM * math.atan2(math.sqrt(h), math.sqrt(max(0.0, 1.0 - h)))
