"""Small deterministic datasets used by the test suite, docs, and demos.

Everything here is synthetic. The two-branch merge fixture is the canonical
"memory matters" example: two upstream ports route through a shared hub to
two distinct downstreams, which a first-order network cannot represent.
"""

from __future__ import annotations

import random

from .ingest import Hop, PortRecord, PortTable, Trajectory, TrajectorySet

SHIP_TYPES = ("container", "tanker", "bulk", "passenger")


def _traj(ship_id: str, ports: list[str], ship_type: str, month: int) -> Trajectory:
    hops = [Hop(p, ship_type, month) for p in ports]
    return Trajectory(ship_id=ship_id, hops=hops)


# --- two-branch merge fixture (A->M->X, B->M->Y) --------------------------

MERGE_PORTS_CSV = """\
port_id,name,lat,lon,country,eco_realm,temperature,salinity,freshwater
A,Alpha Harbor,1.0,103.0,SG,Central Indo-Pacific,28.0,33.0,false
B,Bravo Terminal,35.0,129.0,KR,Temperate Northern Pacific,16.0,33.5,false
M,Midway Hub,22.0,114.0,HK,Central Indo-Pacific,24.0,32.5,false
X,Xray Port,3.0,101.0,MY,Central Indo-Pacific,29.0,32.0,false
Y,Yankee Port,31.0,122.0,CN,Temperate Northern Pacific,18.0,31.0,false
"""


def merge_trajectories() -> TrajectorySet:
    """5 paths A,M,X and 5 paths B,M,Y; ten distinct ships."""
    trajs = [_traj(f"s{i:02d}", ["A", "M", "X"], SHIP_TYPES[i % 2], month=1 + i)
             for i in range(5)]
    trajs += [_traj(f"s{i + 5:02d}", ["B", "M", "Y"], SHIP_TYPES[(i + 1) % 2],
                    month=7 + i)
              for i in range(5)]
    return TrajectorySet(trajectories=trajs)


def merge_voyages_csv() -> str:
    """Same ten paths expressed as voyage rows for the ingest pipeline."""
    rows = ["ship_id,ship_type,src_port,dst_port,depart_time,arrive_time"]
    for i in range(5):
        ma, mb = 1 + i, 7 + i
        rows.append(f"s{i:02d},{SHIP_TYPES[i % 2]},A,M,"
                    f"2024-{ma:02d}-01T00:00:00,2024-{ma:02d}-02T00:00:00")
        rows.append(f"s{i:02d},{SHIP_TYPES[i % 2]},M,X,"
                    f"2024-{ma:02d}-03T00:00:00,2024-{ma:02d}-04T00:00:00")
        rows.append(f"s{i + 5:02d},{SHIP_TYPES[(i + 1) % 2]},B,M,"
                    f"2024-{mb:02d}-01T00:00:00,2024-{mb:02d}-02T00:00:00")
        rows.append(f"s{i + 5:02d},{SHIP_TYPES[(i + 1) % 2]},M,Y,"
                    f"2024-{mb:02d}-03T00:00:00,2024-{mb:02d}-04T00:00:00")
    return "\n".join(rows) + "\n"


# --- three-port grouping fixture -------------------------------------------

def singapore_ports() -> PortTable:
    recs = [
        PortRecord("Singapore", "Singapore", 1.26, 103.84, "SG",
                   "Central Indo-Pacific", 28.5, 32.0, False),
        PortRecord("Port Klang", "Port Klang", 3.0, 101.4, "MY",
                   "Central Indo-Pacific", 29.0, 31.5, False),
        PortRecord("Shanghai", "Shanghai", 31.2, 121.5, "CN",
                   "Temperate Northern Pacific", 17.0, 25.0, False),
    ]
    return PortTable(ports={r.port_id: r for r in recs})


# --- synthetic Markov corpora ----------------------------------------------

def _rule1(cur: int, n: int) -> int:
    nxt = (2 * cur + 3) % n
    return (nxt + 1) % n if nxt == cur else nxt


def _rule2(prev: int, cur: int, n: int) -> int:
    nxt = (prev + 2 * cur + 1) % n
    return (nxt + 1) % n if nxt == cur else nxt


def markov_corpus(order: int,
                  n_sequences: int = 2000,
                  seq_length: int = 12,
                  n_ports: int = 8,
                  strength: float = 0.9,
                  seed: int = 7) -> TrajectorySet:
    """Trajectories from a port-valued Markov chain of the given memory order.

    With probability `strength` the next port follows a fixed rule of the
    last `order` ports (a rule that, for order 2, varies with the
    second-to-last port, so first-order statistics genuinely lose
    information); otherwise it is uniform over the other ports. Consecutive
    ports are never equal.
    """
    if order not in (1, 2):
        raise ValueError(f"order must be 1 or 2, got {order}")
    rng = random.Random(seed)
    ports = [f"p{i}" for i in range(n_ports)]
    trajs = []
    for s in range(n_sequences):
        seq = [rng.randrange(n_ports)]
        while len(seq) < seq_length:
            cur = seq[-1]
            if order == 2 and len(seq) >= 2:
                ruled = _rule2(seq[-2], cur, n_ports)
            else:
                ruled = _rule1(cur, n_ports)
            if rng.random() < strength:
                nxt = ruled
            else:
                nxt = rng.randrange(n_ports - 1)
                if nxt >= cur:
                    nxt += 1
            seq.append(nxt)
        ship_type = SHIP_TYPES[s % len(SHIP_TYPES)]
        month = (s * 5) % 12 + 1
        trajs.append(_traj(f"ship{s:05d}", [ports[i] for i in seq],
                           ship_type, month))
    return TrajectorySet(trajectories=trajs)


def corpus_ports_csv(n_ports: int = 8) -> str:
    """Port table covering the markov_corpus port ids."""
    realms = ("Central Indo-Pacific", "Temperate Northern Pacific",
              "Tropical Atlantic")
    rows = ["port_id,name,lat,lon,country,eco_realm,temperature,salinity,freshwater"]
    for i in range(n_ports):
        rows.append(f"p{i},Port {i},{-30 + 8 * i},{10 + 15 * i},XX,"
                    f"{realms[i % 3]},{10 + i},{30 + 0.5 * i},false")
    return "\n".join(rows) + "\n"


# --- randomized property-test material --------------------------------------

def random_trajectories(seed: int,
                        n_ports: int | None = None,
                        n_sequences: int | None = None) -> TrajectorySet:
    """Arbitrary small trajectory set; same seed, same data."""
    rng = random.Random(seed)
    if n_ports is None:
        n_ports = rng.randint(3, 9)
    if n_sequences is None:
        n_sequences = rng.randint(4, 25)
    ports = [f"q{i}" for i in range(n_ports)]
    trajs = []
    for s in range(n_sequences):
        length = rng.randint(2, 8)
        seq = [rng.randrange(n_ports)]
        while len(seq) < length:
            nxt = rng.randrange(n_ports - 1)
            if nxt >= seq[-1]:
                nxt += 1
            seq.append(nxt)
        trajs.append(_traj(f"r{s:03d}", [ports[i] for i in seq],
                           SHIP_TYPES[s % len(SHIP_TYPES)], rng.randint(1, 12)))
    return TrajectorySet(trajectories=trajs)
