"""Atomic read-modify-write primitives usable inside ``@njit`` kernels.

Numba exposes no CPU atomics, so these lower straight to LLVM ``cmpxchg`` /
``atomicrmw`` instructions on an array element. All use sequentially
consistent ordering.
"""
from llvmlite import ir
from numba import types
from numba.core import cgutils
from numba.extending import intrinsic


def _element_pointer(context, builder, arrty, arr, idx):
    ary = context.make_array(arrty)(context, builder, arr)
    return cgutils.get_item_pointer(context, builder, arrty, ary, [idx])


@intrinsic
def cas(typingctx, arr, idx, expected, desired):
    """Compare-and-swap ``arr[idx]``; returns True if the swap happened."""
    sig = types.boolean(arr, idx, arr.dtype, arr.dtype)

    def codegen(context, builder, signature, args):
        arrty, idxty, expty, desty = signature.args
        a, i, e, d = args
        ptr = _element_pointer(context, builder, arrty, a, i)
        e = context.cast(builder, e, expty, arrty.dtype)
        d = context.cast(builder, d, desty, arrty.dtype)
        res = builder.cmpxchg(ptr, e, d, "seq_cst", "seq_cst")
        return builder.extract_value(res, 1)

    return sig, codegen


@intrinsic
def fetch_add(typingctx, arr, idx, delta):
    """Atomically add ``delta`` to ``arr[idx]`` and return the old value."""
    sig = arr.dtype(arr, idx, arr.dtype)

    def codegen(context, builder, signature, args):
        arrty, idxty, dty = signature.args
        a, i, d = args
        ptr = _element_pointer(context, builder, arrty, a, i)
        d = context.cast(builder, d, dty, arrty.dtype)
        return builder.atomic_rmw("add", ptr, d, "seq_cst")

    return sig, codegen


@intrinsic
def atomic_load(typingctx, arr, idx):
    """Sequentially consistent load of ``arr[idx]``."""
    sig = arr.dtype(arr, idx)

    def codegen(context, builder, signature, args):
        arrty, idxty = signature.args
        a, i = args
        ptr = _element_pointer(context, builder, arrty, a, i)
        # atomicrmw 'or 0' doubles as an ordered load on every backend
        zero = ir.Constant(context.get_value_type(arrty.dtype), 0)
        return builder.atomic_rmw("or", ptr, zero, "seq_cst")

    return sig, codegen


@intrinsic
def atomic_min(typingctx, arr, idx, value):
    """Atomically lower ``arr[idx]`` to ``value`` (signed); returns old value."""
    sig = arr.dtype(arr, idx, arr.dtype)

    def codegen(context, builder, signature, args):
        arrty, idxty, vty = signature.args
        a, i, v = args
        ptr = _element_pointer(context, builder, arrty, a, i)
        v = context.cast(builder, v, vty, arrty.dtype)
        return builder.atomic_rmw("min", ptr, v, "seq_cst")

    return sig, codegen


@intrinsic
def atomic_max(typingctx, arr, idx, value):
    """Atomically raise ``arr[idx]`` to ``value`` (signed); returns old value."""
    sig = arr.dtype(arr, idx, arr.dtype)

    def codegen(context, builder, signature, args):
        arrty, idxty, vty = signature.args
        a, i, v = args
        ptr = _element_pointer(context, builder, arrty, a, i)
        v = context.cast(builder, v, vty, arrty.dtype)
        return builder.atomic_rmw("max", ptr, v, "seq_cst")

    return sig, codegen
