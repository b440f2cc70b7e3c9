# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled mask kernels: exhaustive permutation sweeps over bit masks."""

from libc.stdlib cimport free, malloc


def apply_perm_to_mask(perm, mask):
    """Image of a floor mask under a floor permutation (bit j -> bit perm[j])."""
    cdef int out = 0
    cdef int j, n = len(perm)
    cdef int m = mask
    for j in range(n):
        if m >> j & 1:
            out |= 1 << (<int> perm[j])
    return out


def min_image_table(int n):
    """Smallest image of every n-floor mask over all n! floor permutations."""
    if n < 1 or n > 16:
        raise ValueError("floor count out of range")
    cdef long size = 1 << n
    cdef int half = n >> 1
    cdef long lo_size = 1 << half
    cdef long hi_size = 1 << (n - half)
    cdef long* best = <long*> malloc(size * sizeof(long))
    cdef long* lo_tab = <long*> malloc(lo_size * sizeof(long))
    cdef long* hi_tab = <long*> malloc(hi_size * sizeof(long))
    cdef int perm[16]
    cdef int i, j, tmp, k, l
    cdef long m, img
    if best == NULL or lo_tab == NULL or hi_tab == NULL:
        free(best)
        free(lo_tab)
        free(hi_tab)
        raise MemoryError()
    try:
        for m in range(size):
            best[m] = size
        for i in range(n):
            perm[i] = i
        while True:
            for m in range(lo_size):
                img = 0
                for j in range(half):
                    if m >> j & 1:
                        img |= 1 << perm[j]
                lo_tab[m] = img
            for m in range(hi_size):
                img = 0
                for j in range(n - half):
                    if m >> j & 1:
                        img |= 1 << perm[half + j]
                hi_tab[m] = img
            for m in range(size):
                img = lo_tab[m & (lo_size - 1)] | hi_tab[m >> half]
                if img < best[m]:
                    best[m] = img
            # lexicographic next permutation
            i = n - 2
            while i >= 0 and perm[i] >= perm[i + 1]:
                i -= 1
            if i < 0:
                break
            j = n - 1
            while perm[j] <= perm[i]:
                j -= 1
            tmp = perm[i]
            perm[i] = perm[j]
            perm[j] = tmp
            k = i + 1
            l = n - 1
            while k < l:
                tmp = perm[k]
                perm[k] = perm[l]
                perm[l] = tmp
                k += 1
                l -= 1
        return [best[m] for m in range(size)]
    finally:
        free(best)
        free(lo_tab)
        free(hi_tab)
