"""Arguments and instance construction shared by the single-instance commands"""
import argparse

from ..config import BOX_FACTOR, MASTER_SEED
from ..errors import ModelSpecError
from ..geometry import Point
from ..harness import build_instance
from ..io import load_site_file
from ..models import FixedWeightsSampledLocations, Rng, jitter_ordering, ordering_from_weights, parse_model, sample_ordering
from ..prefix_cells import Ordering


def n_list(text: str) -> list[int]:
    """Comma-separated n values, e.g. 64,128,256"""
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"'{text}' is not a comma-separated list of integers") from None


def point(text: str) -> Point:
    try:
        x, y = (float(t) for t in text.split(","))
        return Point(x, y)
    except ValueError:
        raise argparse.ArgumentTypeError(f"'{text}' is not a point x,y") from None


def add_instance_arguments(parser: argparse.ArgumentParser):
    parser.add_argument("--sites", help="CSV site file with header x,y[,weight]")
    parser.add_argument("--n", type=int, help="number of random unit-square sites (without --sites)")
    parser.add_argument("--model", default="iid:uniform:1:2", help="weight model spec")
    parser.add_argument("--seed", type=int, default=MASTER_SEED, help="master seed")
    parser.add_argument("--jitter", type=float, default=0.0, help="jitter magnitude relative to the site diameter")
    parser.add_argument("--box-factor", type=float, default=BOX_FACTOR, help="world box inflation")
    parser.add_argument("--out", help="output JSON path (stdout when omitted)")


def instance_from_args(args: argparse.Namespace) -> Ordering:
    """Ordering from a site file or a random instance, optionally jittered"""
    if args.seed < 0:
        raise ModelSpecError("seed must be nonnegative")
    rng = Rng(args.seed)
    gen = rng.generator()
    model = parse_model(args.model)

    if args.sites:
        locations, weights = load_site_file(args.sites)
        if weights is None:
            ord = sample_ordering(locations, model, gen)
        elif model.samples_locations:
            #File weights on freshly sampled unit-square locations
            ord = sample_ordering(locations, FixedWeightsSampledLocations(tuple(weights)), gen)
        else:
            ord = ordering_from_weights(locations, weights, gen.random(len(locations)))
    elif args.n:
        if args.n < 1:
            raise ModelSpecError("--n must be positive")
        ord = build_instance(args.n, model, gen)
    else:
        raise ModelSpecError("give --sites or --n")

    if args.jitter:
        ord = jitter_ordering(ord, args.jitter * ord.scale, rng.child(0))
    return ord
