"""Datasets of newform orbits, genus-3 curves and local certificates.

The on-disk format is one JSON object with keys ``meta``, ``newforms``,
``curves`` and ``certificates``.  Atkin-Lehner signs are eigenvalues of the
involution w_p itself (the LMFDB ``atkin_lehner_eigenvals`` convention); for a
newform with p || N this is -a_p.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import time
import urllib.error
import urllib.parse
import urllib.request
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path
from typing import Callable, Mapping

from .arith import MINUS, PLUS, factorize
from .localglobal import LocalComponent, LocalDataError
from .repcore import GroupSpec, character_table

SCHEMA_VERSION = 1
FIXTURE_NAME = "go_table1.json"


class DataError(ValueError):
    """Base class; ``kind`` names the failed check."""

    kind = "data"


class SchemaError(DataError):
    kind = "schema"


class DanglingReferenceError(DataError):
    kind = "dangling-reference"


class GenusMismatchError(DataError):
    kind = "genus-mismatch"


class InvariantError(DataError):
    """A certificate or record contradicting a structural identity."""

    kind = "invariant"


class OfflineError(RuntimeError):
    """Neither the network nor the cache could answer."""


def _fail(cls, where: str, msg: str):
    raise cls(f"{where}: {msg}")


@dataclass(frozen=True)
class NewformOrbit:
    label: str
    level: int
    weight: int
    hecke_degree: int
    atkin_lehner: dict = field(default_factory=dict)  # p -> +1/-1
    local_types: dict = field(default_factory=dict)  # p -> LocalComponent
    nebentypus_trivial: bool = True
    extra: dict = field(default_factory=dict)

    def primes(self) -> list[int]:
        return sorted(factorize(self.level))

    def valuation(self, p: int) -> int:
        return factorize(self.level).get(p, 0)

    def to_json(self) -> dict:
        out = {
            "label": self.label,
            "level": self.level,
            "weight": self.weight,
            "hecke_degree": self.hecke_degree,
            "nebentypus_trivial": self.nebentypus_trivial,
            "atkin_lehner": {str(p): s for p, s in sorted(self.atkin_lehner.items())},
        }
        if self.local_types:
            out["local_types"] = {str(p): c.to_json() for p, c in sorted(self.local_types.items())}
        out.update(self.extra)
        return out


@dataclass(frozen=True)
class CurveRecord:
    label: str
    level: int
    genus: int
    newforms: tuple[str, ...]
    expected_unknown: bool = False
    extra: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {
            "label": self.label,
            "level": self.level,
            "genus": self.genus,
            "newforms": list(self.newforms),
        }
        if self.expected_unknown:
            out["expected_unknown"] = True
        out.update(self.extra)
        return out


@dataclass(frozen=True)
class Certificate:
    """Externally derived local data at one prime.

    ``payload["type"]`` is one of
      * ``dihedral``: the Jacquet-Langlands transfer of the newform's local
        component factors through ``group``; ``reps`` lists the irreducible
        label for each complex embedding of the Hecke field (``rep`` if all agree);
      * ``local_type``: an explicit LocalComponent for the newform;
      * ``direct``: dimensions ``hom_gl2`` and ``hom_d`` for a triple.
    """

    id: str
    prime: int
    newform: str | None = None
    triple: tuple[str, ...] | None = None
    payload: dict = field(default_factory=dict)
    note: str = ""

    @property
    def kind(self) -> str:
        return self.payload["type"]

    def components(self, degree: int) -> list[LocalComponent]:
        """One local component per embedding, for newform-scoped certificates."""
        t = self.kind
        if t == "dihedral":
            g = _group(self.payload["group"])
            reps = self.payload.get("reps") or [self.payload["rep"]] * degree
            return [LocalComponent.dihedral(g, r, certificate_id=self.id) for r in reps]
        if t == "local_type":
            comp = LocalComponent.from_json(self.payload["component"])
            comp = replace(comp, certificate_id=comp.certificate_id or self.id)
            return [comp] * degree
        raise InvariantError(f"certificate {self.id}: a {t} payload carries no local components")

    def to_json(self) -> dict:
        scope: dict = {"prime": self.prime}
        if self.newform is not None:
            scope["newform"] = self.newform
        else:
            scope["triple"] = list(self.triple)
        out = {"id": self.id, "scope": scope, "payload": self.payload}
        if self.note:
            out["note"] = self.note
        return out


def _group(obj) -> GroupSpec:
    if isinstance(obj, str):
        return GroupSpec.parse(obj)
    return GroupSpec(str(obj["kind"]), int(obj["n"]))


@dataclass(frozen=True)
class Dataset:
    newforms: dict = field(default_factory=dict)  # label -> NewformOrbit
    curves: dict = field(default_factory=dict)  # label -> CurveRecord
    certificates: tuple[Certificate, ...] = ()
    meta: dict = field(default_factory=dict)

    def orbit(self, label: str) -> NewformOrbit:
        try:
            return self.newforms[label]
        except KeyError:
            raise DanglingReferenceError(f"unknown newform orbit {label!r}") from None

    def curve(self, label: str) -> CurveRecord:
        try:
            return self.curves[label]
        except KeyError:
            raise DanglingReferenceError(f"unknown curve {label!r}") from None

    def newform_certificates(self, label: str, p: int) -> list[Certificate]:
        return [c for c in self.certificates if c.newform == label and c.prime == p]

    def triple_certificates(self, labels, p: int) -> list[Certificate]:
        key = sorted(labels)
        return [c for c in self.certificates if c.triple is not None and sorted(c.triple) == key and c.prime == p]

    def without_certificates(self) -> Dataset:
        return replace(self, certificates=())

    def with_certificates(self, extra) -> Dataset:
        ds = replace(self, certificates=self.certificates + tuple(extra))
        validate(ds)
        return ds

    def local_components(self, label: str, p: int) -> list[LocalComponent] | None:
        """Local components at p, one per embedding, or None when unresolved.

        Explicit local types in the record win, then newform certificates, then
        what the level alone determines.
        """
        orbit = self.orbit(label)
        if p in orbit.local_types:
            return [orbit.local_types[p]] * orbit.hecke_degree
        certs = self.newform_certificates(label, p)
        if certs:
            return certs[0].components(orbit.hecke_degree)
        comp = inferred_component(orbit, p)
        return None if comp is None else [comp] * orbit.hecke_degree

    def to_json(self) -> dict:
        return {
            "meta": self.meta,
            "newforms": [self.newforms[k].to_json() for k in sorted(self.newforms)],
            "curves": [self.curves[k].to_json() for k in sorted(self.curves, key=_curve_key)],
            "certificates": [c.to_json() for c in sorted(self.certificates, key=lambda c: c.id)],
        }


def _curve_key(label: str):
    head = label.split(".")[0].split(":")[0]
    return (int(head) if head.isdigit() else 0, label)


# --- local type inference ---------------------------------------------------

def inferred_component(orbit: NewformOrbit, p: int) -> LocalComponent | None:
    e = orbit.valuation(p)
    if e == 0:
        return LocalComponent.unramified()
    if e == 1:
        return LocalComponent.special(orbit.atkin_lehner.get(p))
    return None


def infer_local_types(orbit: NewformOrbit) -> NewformOrbit:
    """Fill local types at primes exactly dividing the level; keep existing entries."""
    types = dict(orbit.local_types)
    for p in orbit.primes():
        if p not in types:
            comp = inferred_component(orbit, p)
            if comp is not None:
                types[p] = comp
    return replace(orbit, local_types=types)


# --- parsing and validation --------------------------------------------------

_NEWFORM_KEYS = {"label", "level", "weight", "hecke_degree", "nebentypus_trivial", "atkin_lehner", "local_types"}
_CURVE_KEYS = {"label", "level", "genus", "newforms", "expected_unknown"}


def _req(obj: Mapping, key: str, typ, where: str):
    if key not in obj:
        _fail(SchemaError, where, f"missing field {key!r}")
    val = obj[key]
    if typ is int and (isinstance(val, bool) or not isinstance(val, int)):
        _fail(SchemaError, where, f"field {key!r} must be an integer, got {val!r}")
    if typ is not int and not isinstance(val, typ):
        _fail(SchemaError, where, f"field {key!r} must be {typ.__name__}, got {type(val).__name__}")
    return val


def _parse_newform(obj) -> NewformOrbit:
    if not isinstance(obj, dict):
        raise SchemaError(f"newform record must be an object, got {obj!r}")
    label = _req(obj, "label", str, "newform")
    where = f"newform {label}"
    level = _req(obj, "level", int, where)
    weight = _req(obj, "weight", int, where)
    degree = _req(obj, "hecke_degree", int, where)
    neben = obj.get("nebentypus_trivial", True)
    if level < 1:
        _fail(SchemaError, where, "level must be positive")
    if degree < 1:
        _fail(InvariantError, where, f"hecke_degree must be at least 1, got {degree}")
    if weight != 2 or neben is not True:
        _fail(SchemaError, where, "only weight-2 newforms with trivial character are supported")
    primes = factorize(level)
    al = {}
    for key, s in _req(obj, "atkin_lehner", dict, where).items():
        p = int(key)
        if p not in primes:
            _fail(InvariantError, f"{where} field atkin_lehner", f"{p} does not divide the level {level}")
        if s not in (PLUS, MINUS):
            _fail(SchemaError, f"{where} field atkin_lehner", f"sign at {p} must be +1 or -1, got {s!r}")
        al[p] = s
    types = {}
    for key, comp in obj.get("local_types", {}).items():
        p = int(key)
        if p not in primes:
            _fail(InvariantError, f"{where} field local_types", f"{p} does not divide the level {level}")
        try:
            types[p] = LocalComponent.from_json(comp)
        except (LocalDataError, KeyError, ValueError) as exc:
            _fail(SchemaError, f"{where} field local_types[{p}]", str(exc))
        if types[p].kind == "special" and types[p].al_sign is not None and p in al and types[p].al_sign != al[p]:
            _fail(InvariantError, f"{where} field local_types[{p}]", "Special sign disagrees with atkin_lehner")
    for p, e in primes.items():
        if e == 1 and p not in al:
            _fail(InvariantError, f"{where} field atkin_lehner", f"missing sign at {p}, which exactly divides {level}")
        if e > 1 and p in al and not (p in types and types[p].kind == "special"):
            _fail(InvariantError, f"{where} field atkin_lehner",
                  f"sign at {p} given but {p}^2 divides the level and no Special type is declared")
    extra = {k: v for k, v in obj.items() if k not in _NEWFORM_KEYS}
    return NewformOrbit(label, level, weight, degree, al, types, True, extra)


def _parse_curve(obj) -> CurveRecord:
    if not isinstance(obj, dict):
        raise SchemaError(f"curve record must be an object, got {obj!r}")
    label = _req(obj, "label", str, "curve")
    where = f"curve {label}"
    level = _req(obj, "level", int, where)
    genus = _req(obj, "genus", int, where)
    forms = _req(obj, "newforms", list, where)
    if not all(isinstance(f, str) for f in forms):
        _fail(SchemaError, f"{where} field newforms", "entries must be newform labels")
    extra = {k: v for k, v in obj.items() if k not in _CURVE_KEYS}
    return CurveRecord(label, level, genus, tuple(forms), bool(obj.get("expected_unknown", False)), extra)


def _parse_certificate(obj) -> Certificate:
    if not isinstance(obj, dict):
        raise SchemaError(f"certificate must be an object, got {obj!r}")
    cid = _req(obj, "id", str, "certificate")
    where = f"certificate {cid}"
    scope = _req(obj, "scope", dict, where)
    payload = _req(obj, "payload", dict, where)
    prime = _req(scope, "prime", int, f"{where} field scope")
    newform = scope.get("newform")
    triple = scope.get("triple")
    if (newform is None) == (triple is None):
        _fail(SchemaError, f"{where} field scope", "give exactly one of 'newform' and 'triple'")
    if triple is not None:
        if not isinstance(triple, list) or len(triple) != 3:
            _fail(SchemaError, f"{where} field scope.triple", "must list three newform labels")
        triple = tuple(triple)
    kind = payload.get("type")
    if kind == "direct":
        if triple is None:
            _fail(SchemaError, where, "direct verdicts are scoped to a triple")
        a, b = payload.get("hom_gl2"), payload.get("hom_d")
        if a not in (0, 1) or b not in (0, 1):
            _fail(SchemaError, f"{where} field payload", "hom_gl2 and hom_d must be 0 or 1")
        if a + b != 1:
            _fail(InvariantError, f"{where} field payload", f"hom_gl2 + hom_d = {a + b}, the dichotomy needs 1")
    elif kind == "dihedral":
        if newform is None:
            _fail(SchemaError, where, "dihedral assignments are scoped to a newform")
        try:
            g = _group(payload["group"])
            table = character_table(g)
            reps = payload.get("reps") or [payload["rep"]]
            for r in reps:
                table.label(r)
        except (KeyError, ValueError, TypeError) as exc:
            _fail(SchemaError, f"{where} field payload", f"bad dihedral assignment: {exc}")
    elif kind == "local_type":
        if newform is None:
            _fail(SchemaError, where, "local types are scoped to a newform")
        try:
            LocalComponent.from_json(payload["component"])
        except (KeyError, ValueError, TypeError) as exc:
            _fail(SchemaError, f"{where} field payload", f"bad local type: {exc}")
    else:
        _fail(SchemaError, f"{where} field payload.type", f"unknown certificate type {kind!r}")
    return Certificate(cid, prime, newform, triple, payload, str(obj.get("note", "")))


def parse_dataset(obj) -> Dataset:
    if not isinstance(obj, dict):
        raise SchemaError("dataset must be a JSON object")
    unknown = set(obj) - {"meta", "newforms", "curves", "certificates"}
    if unknown:
        raise SchemaError(f"unknown top-level keys {sorted(unknown)}")
    for key in ("newforms", "curves", "certificates"):
        if not isinstance(obj.get(key, []), list):
            raise SchemaError(f"top-level {key!r} must be a list")
    meta = obj.get("meta", {})
    if not isinstance(meta, dict):
        raise SchemaError("top-level 'meta' must be an object")
    newforms: dict = {}
    for rec in obj.get("newforms", []):
        nf = _parse_newform(rec)
        if nf.label in newforms:
            raise SchemaError(f"newform {nf.label}: duplicate label")
        newforms[nf.label] = nf
    curves: dict = {}
    for rec in obj.get("curves", []):
        c = _parse_curve(rec)
        if c.label in curves:
            raise SchemaError(f"curve {c.label}: duplicate label")
        curves[c.label] = c
    certs = []
    for rec in obj.get("certificates", []):
        certs.append(_parse_certificate(rec))
    ds = Dataset(newforms, curves, tuple(certs), meta)
    validate(ds)
    return ds


def validate(ds: Dataset) -> None:
    for c in ds.curves.values():
        where = f"curve {c.label}"
        total = 0
        for lab in c.newforms:
            if lab not in ds.newforms:
                _fail(DanglingReferenceError, f"{where} field newforms", f"unknown newform {lab!r}")
            nf = ds.newforms[lab]
            if nf.level != c.level:
                _fail(InvariantError, f"{where} field newforms", f"{lab} has level {nf.level}, not {c.level}")
            total += nf.hecke_degree
        if total != c.genus:
            _fail(GenusMismatchError, f"{where} field genus",
                  f"newform dimensions sum to {total}, genus is {c.genus}")
    seen = set()
    for cert in ds.certificates:
        where = f"certificate {cert.id}"
        if cert.id in seen:
            _fail(SchemaError, where, "duplicate certificate id")
        seen.add(cert.id)
        labels = [cert.newform] if cert.newform is not None else list(cert.triple)
        for lab in labels:
            if lab not in ds.newforms:
                _fail(DanglingReferenceError, f"{where} field scope", f"unknown newform {lab!r}")
            if cert.prime not in factorize(ds.newforms[lab].level):
                _fail(InvariantError, f"{where} field scope", f"{cert.prime} does not divide the level of {lab}")
        if cert.kind == "dihedral" and "reps" in cert.payload:
            deg = ds.newforms[cert.newform].hecke_degree
            if len(cert.payload["reps"]) != deg:
                _fail(InvariantError, f"{where} field payload.reps",
                      f"{len(cert.payload['reps'])} labels for a Hecke field of degree {deg}")


def load_dataset(path) -> Dataset:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise SchemaError(f"{path}: cannot read ({exc.strerror})") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON ({exc})") from exc
    return parse_dataset(obj)


def load_certificates(path) -> list[Certificate]:
    """Certificates from a file holding either a list or a dataset-shaped object."""
    obj = json.loads(Path(path).read_text(encoding="utf-8"))
    if isinstance(obj, dict):
        obj = obj.get("certificates", [])
    if not isinstance(obj, list):
        raise SchemaError(f"{path}: expected a list of certificates")
    return [_parse_certificate(c) for c in obj]


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1, ensure_ascii=False) + "\n"


def dumps_dataset(ds: Dataset) -> str:
    return canonical_json(ds.to_json())


def save_dataset(ds: Dataset, path) -> None:
    Path(path).write_text(dumps_dataset(ds), encoding="utf-8")


def fixture_path() -> Path:
    return Path(str(resources.files("diagcycle") / "fixtures" / FIXTURE_NAME))


def load_fixture() -> Dataset:
    return load_dataset(fixture_path())


# --- LMFDB client ------------------------------------------------------------

LMFDB_API = "https://www.lmfdb.org/api/mf_newforms/"
SOURCE_VERSION = "lmfdb-api-mf_newforms-v1"
ENV_CACHE_DIR = "DIAGCYCLE_CACHE_DIR"
ENV_OFFLINE = "DIAGCYCLE_OFFLINE"
MIN_INTERVAL = 1.0  # seconds between requests

_rate_lock = threading.Lock()
_last_request = [0.0]
_write_lock = threading.Lock()


def default_cache_dir() -> Path:
    env = os.environ.get(ENV_CACHE_DIR)
    if env:
        return Path(env)
    return Path(os.environ.get("XDG_CACHE_HOME", Path.home() / ".cache")) / "diagcycle"


def offline_requested() -> bool:
    return os.environ.get(ENV_OFFLINE, "").strip().lower() in ("1", "true", "yes", "on")


def cache_key(level: int, weight: int) -> str:
    blob = json.dumps({"level": level, "weight": weight, "source": SOURCE_VERSION}, sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()


@dataclass(frozen=True)
class FetchResult:
    orbits: list
    source: str  # "network" | "cache"
    fetched_at: str
    stale: bool = False

    @property
    def flag(self) -> str | None:
        return f"stale: {self.fetched_at}" if self.stale else None


def _http_get(url: str, timeout: float = 30.0) -> dict:
    req = urllib.request.Request(url, headers={"Accept": "application/json", "User-Agent": "diagcycle"})
    with urllib.request.urlopen(req, timeout=timeout) as resp:
        return json.loads(resp.read().decode("utf-8"))


def _throttle():
    with _rate_lock:
        wait = _last_request[0] + MIN_INTERVAL - time.monotonic()
        if wait > 0:
            time.sleep(wait)
        _last_request[0] = time.monotonic()


def _query_url(level: int, weight: int) -> str:
    params = {
        "level": level,
        "weight": weight,
        "char_order": 1,
        "_format": "json",
        "_fields": "label,level,weight,dim,char_order,atkin_lehner_eigenvals",
        "_max_count": 1000,
    }
    return LMFDB_API + "?" + urllib.parse.urlencode(params)


def orbits_from_api(records: list) -> list[NewformOrbit]:
    out = []
    for rec in records:
        if rec.get("char_order", 1) != 1 or rec.get("weight") != 2:
            continue
        al = {int(p): int(s) for p, s in (rec.get("atkin_lehner_eigenvals") or [])}
        level = int(rec["level"])
        # p^2 | N: LMFDB still lists the w_p eigenvalue; keep only p || N, which is what Special needs
        al = {p: s for p, s in al.items() if factorize(level).get(p) == 1}
        out.append(NewformOrbit(str(rec["label"]), level, 2, int(rec["dim"]), al))
    return sorted(out, key=lambda o: o.label)


def _write_cache(path: Path, payload: dict) -> None:
    with _write_lock:
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(f".tmp{os.getpid()}")
        tmp.write_text(canonical_json(payload), encoding="utf-8")
        os.replace(tmp, path)


def lmfdb_fetch(
    level: int,
    weight: int = 2,
    cache_dir=None,
    offline: bool | None = None,
    transport: Callable[[str], dict] | None = None,
) -> FetchResult:
    """Gamma_0(level) newform orbits with Atkin-Lehner signs.

    The network is tried first unless offline; a failure falls back to the
    cache and marks the answer stale.  ``transport`` replaces the HTTP GET.
    """
    if weight != 2:
        raise ValueError("only weight 2 is supported")
    cache = Path(cache_dir) if cache_dir is not None else default_cache_dir()
    path = cache / f"{cache_key(level, weight)}.json"
    offline = offline_requested() if offline is None else offline
    get = transport or _http_get

    def from_cache(stale: bool) -> FetchResult:
        try:
            blob = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError):
            raise OfflineError(
                f"no cached LMFDB answer for level {level} in {cache}"
                + (" and offline mode is on" if offline else " and the network request failed")
            ) from None
        return FetchResult(orbits_from_api(blob["data"]), "cache", blob["fetched_at"], stale)

    if offline:
        return from_cache(stale=True)
    try:
        _throttle()
        answer = get(_query_url(level, weight))
        data = answer["data"] if isinstance(answer, dict) else answer
    except (urllib.error.URLError, OSError, ValueError, KeyError, TimeoutError):
        return from_cache(stale=True)
    stamp = datetime.now(timezone.utc).replace(microsecond=0).isoformat()
    _write_cache(path, {"fetched_at": stamp, "level": level, "weight": weight,
                        "source": SOURCE_VERSION, "data": data})
    return FetchResult(orbits_from_api(data), "network", stamp, False)
