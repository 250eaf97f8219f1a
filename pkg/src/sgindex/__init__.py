"""Succinct and implicit point location over planar triangulations.

Connectivity of each small piece of the input is stored in the order of its
points, so the index itself keeps only a coarse point-location layer and
label-conversion tables.
"""
from .bitvec import BitVec, bv_build, bv_rank, bv_select
from .errors import SgiError
from .geom import orient, point_in_triangle
from .harness import oracle_locate, run
from .implicit import (ImplicitArray, implicit_build, implicit_encode, implicit_locate,
                       implicit_point_by_label, implicit_read_bit, implicit_read_field)
from .index import (BuildParams, SuccinctIndex, build_index, index_size_bits, load_index, locate,
                    region_to_graph, sub_to_region)
from .mesh import Triangulation, gen_random, load_tri, validate
from .permcode import (CodecConfig, decode_subdivision, decode_triangulation, encode_subdivision,
                       encode_triangulation)
from .pointloc import build_pl, pl_locate
from .separator import face_separator, vertex_separator
