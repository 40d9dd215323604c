# cython: boundscheck=False, wraparound=False, nonecheck=False, cdivision=True
"""Compiled descent/repair kernels.

Function-for-function twin of numpy_backend; the solver drives whichever of
the two is selected at import.  All hot loops run without the GIL.
"""
from libc.stdlib cimport free, malloc

NAME = "c"


cdef void _residuals(const double* s, const double* p,
                     const int* ca, const int* cb, int ng,
                     const int* da, const int* db, int nd,
                     double* out) noexcept nogil:
    cdef int i, a, b
    for i in range(ng):
        out[i] = s[ca[i]] - s[cb[i]] + p[ca[i]]
    for i in range(nd):
        a = da[i]
        b = db[i]
        if s[a] <= s[b]:
            out[ng + i] = s[a] + p[a] - s[b]
        else:
            out[ng + i] = s[b] + p[b] - s[a]


cdef void _terms(const double* s, const double* p, int n,
                 const int* ca, const int* cb, int ng,
                 const int* da, const int* db, int nd,
                 const double* lam,
                 double* out_obj, double* out_pen,
                 double* out_mult) noexcept nogil:
    cdef int i, a, b
    cdef double cmax = s[0] + p[0]
    cdef double smin = s[0]
    cdef double pen = 0.0
    cdef double mult = 0.0
    cdef double r
    for i in range(1, n):
        if s[i] + p[i] > cmax:
            cmax = s[i] + p[i]
        if s[i] < smin:
            smin = s[i]
    for i in range(ng):
        r = s[ca[i]] - s[cb[i]] + p[ca[i]]
        if r > 0:
            pen += 0.5 * r * r
        if lam != NULL:
            mult += lam[i] * r
    for i in range(nd):
        a = da[i]
        b = db[i]
        if s[a] <= s[b]:
            r = s[a] + p[a] - s[b]
        else:
            r = s[b] + p[b] - s[a]
        if r > 0:
            pen += 0.5 * r * r
        if lam != NULL:
            mult += lam[ng + i] * r
    out_obj[0] = cmax - smin
    out_pen[0] = pen
    out_mult[0] = mult


cdef void _gradient(const double* s, const double* p, int n,
                    const int* ca, const int* cb, int ng,
                    const int* da, const int* db, int nd,
                    double K, const double* lam, double* g) noexcept nogil:
    cdef int i, a, b, e1, e2
    cdef int nmax = 0, nmin = 0
    cdef double cmax = s[0] + p[0]
    cdef double smin = s[0]
    cdef double r, w
    for i in range(n):
        g[i] = 0.0
        if s[i] + p[i] > cmax:
            cmax = s[i] + p[i]
        if s[i] < smin:
            smin = s[i]
    for i in range(n):
        if s[i] + p[i] == cmax:
            nmax += 1
        if s[i] == smin:
            nmin += 1
    for i in range(n):
        if s[i] + p[i] == cmax:
            g[i] += 1.0 / nmax
        if s[i] == smin:
            g[i] -= 1.0 / nmin
    for i in range(ng):
        a = ca[i]
        b = cb[i]
        r = s[a] - s[b] + p[a]
        w = K * r if r > 0 else 0.0
        if lam != NULL:
            w += lam[i]
        g[a] += w
        g[b] -= w
    for i in range(nd):
        a = da[i]
        b = db[i]
        if s[a] <= s[b]:
            e1 = a
            e2 = b
            r = s[a] + p[a] - s[b]
        else:
            e1 = b
            e2 = a
            r = s[b] + p[b] - s[a]
        w = K * r if r > 0 else 0.0
        if lam != NULL:
            w += lam[ng + i]
        g[e1] += w
        g[e2] -= w


cdef bint _disjunctive_pass(double* w, const double* p,
                            const int* mptr, const int* mops, int n_machines,
                            int* buf) noexcept nogil:
    cdef bint changed = False
    cdef int m, lo, cnt, i, j, k, idx
    cdef double acc, end, t
    for m in range(n_machines):
        lo = mptr[m]
        cnt = mptr[m + 1] - lo
        if cnt < 2:
            continue
        # stable insertion sort by start; segment is already in op-id order
        for i in range(cnt):
            buf[i] = mops[lo + i]
        for i in range(1, cnt):
            idx = buf[i]
            j = i - 1
            while j >= 0 and w[buf[j]] > w[idx]:
                buf[j + 1] = buf[j]
                j -= 1
            buf[j + 1] = idx
        acc = 0.0
        end = w[buf[0]] + p[buf[0]]
        for i in range(1, cnt):
            k = buf[i]
            t = w[k] + acc
            if t < end:
                acc += end - t
                t = end
                changed = True
            w[k] = t
            end = t + p[k]
    return changed


cdef bint _conjunctive_pass(double* w, const double* p,
                            const int* jptr, int n_jobs) noexcept nogil:
    cdef bint changed = False
    cdef int i, k, lo, hi
    cdef double acc, end, t
    for i in range(n_jobs):
        lo = jptr[i]
        hi = jptr[i + 1]
        acc = 0.0
        end = w[lo] + p[lo]
        for k in range(lo + 1, hi):
            t = w[k] + acc
            if t < end:
                acc += end - t
                t = end
                changed = True
            w[k] = t
            end = t + p[k]
    return changed


cdef double _compact(const double* w, const double* p, int n,
                     const int* op_job, const int* jptr,
                     const int* mptr, const int* mops, int n_machines,
                     double* out, int* buf) noexcept nogil:
    """Longest-path earliest starts over the orientation induced by w.

    Kahn propagation over job chains + per-machine start orders; buf must
    hold 5*n ints.  Returns the new cycle time, or -2.0 if the orientation
    is cyclic (infeasible input).
    """
    cdef int* mpred = buf
    cdef int* msucc = buf + n
    cdef int* indeg = buf + 2 * n
    cdef int* queue = buf + 3 * n
    cdef int* sortbuf = buf + 4 * n
    cdef int m, lo, cnt, i, j, k, idx, head, tail, prev, done
    cdef double t, t2, tau
    for i in range(n):
        mpred[i] = -1
        msucc[i] = -1
    for m in range(n_machines):
        lo = mptr[m]
        cnt = mptr[m + 1] - lo
        if cnt == 0:
            continue
        for i in range(cnt):
            sortbuf[i] = mops[lo + i]
        for i in range(1, cnt):
            idx = sortbuf[i]
            j = i - 1
            while j >= 0 and w[sortbuf[j]] > w[idx]:
                sortbuf[j + 1] = sortbuf[j]
                j -= 1
            sortbuf[j + 1] = idx
        for i in range(1, cnt):
            mpred[sortbuf[i]] = sortbuf[i - 1]
            msucc[sortbuf[i - 1]] = sortbuf[i]
    head = 0
    tail = 0
    for i in range(n):
        indeg[i] = 0
        if i > jptr[op_job[i]]:
            indeg[i] += 1
        if mpred[i] >= 0:
            indeg[i] += 1
        if indeg[i] == 0:
            queue[tail] = i
            tail += 1
    tau = 0.0
    done = 0
    while head < tail:
        k = queue[head]
        head += 1
        done += 1
        t = 0.0
        if k > jptr[op_job[k]]:
            t = out[k - 1] + p[k - 1]
        prev = mpred[k]
        if prev >= 0:
            t2 = out[prev] + p[prev]
            if t2 > t:
                t = t2
        out[k] = t
        if t + p[k] > tau:
            tau = t + p[k]
        j = k + 1
        if j < jptr[op_job[k] + 1]:
            indeg[j] -= 1
            if indeg[j] == 0:
                queue[tail] = j
                tail += 1
        j = msucc[k]
        if j >= 0:
            indeg[j] -= 1
            if indeg[j] == 0:
                queue[tail] = j
                tail += 1
    if done != n:
        return -2.0
    return tau


cdef double _repair_compact(const double* starts, const double* p, int n,
                            const int* op_job, const int* jptr, int n_jobs,
                            const int* mptr, const int* mops, int n_machines,
                            int max_rounds, double* out,
                            double* w, int* buf) noexcept nogil:
    cdef int rounds = 0
    cdef bint changed
    cdef bint settled = False
    cdef int i
    for i in range(n):
        w[i] = starts[i]
    while rounds < max_rounds:
        changed = _disjunctive_pass(w, p, mptr, mops, n_machines, buf)
        changed |= _conjunctive_pass(w, p, jptr, n_jobs)
        if not changed:
            settled = True
            break
        rounds += 1
    if not settled:
        return -1.0
    return _compact(w, p, n, op_job, jptr, mptr, mops, n_machines, out, buf)


# ---------------------------------------------------------------------------
# Python-visible wrappers.  NULL-safe pointers for empty constraint arrays.

cdef inline const int* _iptr(int[::1] a) noexcept nogil:
    return &a[0] if a.shape[0] > 0 else NULL


def residuals_into(double[::1] starts, double[::1] dur,
                   int[::1] ca, int[::1] cb,
                   int[::1] da, int[::1] db,
                   double[::1] out):
    with nogil:
        _residuals(&starts[0], &dur[0],
                   _iptr(ca), _iptr(cb), ca.shape[0],
                   _iptr(da), _iptr(db), da.shape[0], &out[0])


def energy_terms(double[::1] starts, double[::1] dur,
                 int[::1] ca, int[::1] cb, int[::1] da, int[::1] db):
    cdef double obj, pen, mult
    with nogil:
        _terms(&starts[0], &dur[0], starts.shape[0],
               _iptr(ca), _iptr(cb), ca.shape[0],
               _iptr(da), _iptr(db), da.shape[0],
               NULL, &obj, &pen, &mult)
    return obj, pen


def gradient_into(double[::1] starts, double[::1] dur,
                  int[::1] ca, int[::1] cb, int[::1] da, int[::1] db,
                  double penalty_factor, lam, double[::1] out):
    cdef double[::1] lam_mv
    cdef const double* lam_ptr = NULL
    if lam is not None:
        lam_mv = lam
        lam_ptr = &lam_mv[0]
    with nogil:
        _gradient(&starts[0], &dur[0], starts.shape[0],
                  _iptr(ca), _iptr(cb), ca.shape[0],
                  _iptr(da), _iptr(db), da.shape[0],
                  penalty_factor, lam_ptr, &out[0])


def step_into(double[::1] starts, double[::1] dur,
              int[::1] ca, int[::1] cb, int[::1] da, int[::1] db,
              double penalty_factor, double mu, lam, double[::1] out):
    cdef double[::1] lam_mv
    cdef const double* lam_ptr = NULL
    cdef int n = starts.shape[0]
    cdef int i
    cdef double obj, pen, mult
    cdef double* g
    if lam is not None:
        lam_mv = lam
        lam_ptr = &lam_mv[0]
    g = <double*> malloc(n * sizeof(double))
    if g == NULL:
        raise MemoryError()
    try:
        with nogil:
            _gradient(&starts[0], &dur[0], n,
                      _iptr(ca), _iptr(cb), ca.shape[0],
                      _iptr(da), _iptr(db), da.shape[0],
                      penalty_factor, lam_ptr, g)
            for i in range(n):
                out[i] = starts[i] - mu * g[i]
                if out[i] < 0:
                    out[i] = 0
            _terms(&out[0], &dur[0], n,
                   _iptr(ca), _iptr(cb), ca.shape[0],
                   _iptr(da), _iptr(db), da.shape[0],
                   lam_ptr, &obj, &pen, &mult)
    finally:
        free(g)
    return obj + penalty_factor * pen + mult


def disjunctive_pass(double[::1] w, double[::1] dur,
                     int[::1] machine_ptr, int[::1] machine_ops):
    cdef int n_machines = machine_ptr.shape[0] - 1
    cdef int n = w.shape[0]
    cdef bint changed
    cdef int* buf = <int*> malloc(n * sizeof(int))
    if buf == NULL:
        raise MemoryError()
    try:
        with nogil:
            changed = _disjunctive_pass(&w[0], &dur[0], &machine_ptr[0],
                                        &machine_ops[0], n_machines, buf)
    finally:
        free(buf)
    return bool(changed)


def conjunctive_pass(double[::1] w, double[::1] dur, int[::1] job_ptr):
    cdef bint changed
    with nogil:
        changed = _conjunctive_pass(&w[0], &dur[0], &job_ptr[0],
                                    job_ptr.shape[0] - 1)
    return bool(changed)


def compact_into(double[::1] w, double[::1] dur,
                 int[::1] op_job, int[::1] op_machine,
                 int[::1] job_ptr, int[::1] machine_ptr, int[::1] machine_ops,
                 double[::1] out):
    cdef int n = w.shape[0]
    cdef int n_machines = machine_ptr.shape[0] - 1
    cdef double tau
    cdef int* buf = <int*> malloc(5 * n * sizeof(int))
    if buf == NULL:
        raise MemoryError()
    try:
        with nogil:
            tau = _compact(&w[0], &dur[0], n, &op_job[0], &job_ptr[0],
                           &machine_ptr[0], &machine_ops[0], n_machines,
                           &out[0], buf)
    finally:
        free(buf)
    return tau


def repair_compact_into(double[::1] starts, double[::1] dur,
                        int[::1] op_job, int[::1] op_machine,
                        int[::1] job_ptr, int[::1] machine_ptr,
                        int[::1] machine_ops, int max_rounds,
                        double[::1] out):
    cdef int n = starts.shape[0]
    cdef int n_machines = machine_ptr.shape[0] - 1
    cdef double tau
    cdef double* w = <double*> malloc(n * sizeof(double))
    cdef int* buf = <int*> malloc(5 * n * sizeof(int))
    if w == NULL or buf == NULL:
        free(w)
        free(buf)
        raise MemoryError()
    try:
        with nogil:
            tau = _repair_compact(&starts[0], &dur[0], n, &op_job[0],
                                  &job_ptr[0], job_ptr.shape[0] - 1,
                                  &machine_ptr[0], &machine_ops[0],
                                  n_machines, max_rounds, &out[0], w, buf)
    finally:
        free(w)
        free(buf)
    return tau


def iterate(double[::1] starts, double[::1] dur,
            int[::1] ca, int[::1] cb, int[::1] da, int[::1] db,
            int[::1] op_job, int[::1] op_machine,
            int[::1] job_ptr, int[::1] machine_ptr, int[::1] machine_ops,
            double penalty_factor, double mu, lam, int max_rounds,
            double[::1] repaired_out):
    """Fused solver iteration: descent step in place, then repair+compact.

    Returns (energy of the new state, cycle time of its repaired copy).
    """
    cdef double[::1] lam_mv
    cdef const double* lam_ptr = NULL
    cdef int n = starts.shape[0]
    cdef int n_machines = machine_ptr.shape[0] - 1
    cdef int i
    cdef double obj, pen, mult, tau
    cdef double* g
    cdef int* buf
    if lam is not None:
        lam_mv = lam
        lam_ptr = &lam_mv[0]
    g = <double*> malloc(2 * n * sizeof(double))
    buf = <int*> malloc(5 * n * sizeof(int))
    if g == NULL or buf == NULL:
        free(g)
        free(buf)
        raise MemoryError()
    try:
        with nogil:
            _gradient(&starts[0], &dur[0], n,
                      _iptr(ca), _iptr(cb), ca.shape[0],
                      _iptr(da), _iptr(db), da.shape[0],
                      penalty_factor, lam_ptr, g)
            for i in range(n):
                starts[i] = starts[i] - mu * g[i]
                if starts[i] < 0:
                    starts[i] = 0
            _terms(&starts[0], &dur[0], n,
                   _iptr(ca), _iptr(cb), ca.shape[0],
                   _iptr(da), _iptr(db), da.shape[0],
                   lam_ptr, &obj, &pen, &mult)
            tau = _repair_compact(&starts[0], &dur[0], n, &op_job[0],
                                  &job_ptr[0], job_ptr.shape[0] - 1,
                                  &machine_ptr[0], &machine_ops[0],
                                  n_machines, max_rounds,
                                  &repaired_out[0], g + n, buf)
    finally:
        free(g)
        free(buf)
    return obj + penalty_factor * pen + mult, tau
