#ifndef CYLKIT_H
#define CYLKIT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result codes. The first five match the exit codes of the `cylkit` CLI.
 */
typedef enum CylkitStatus {
  CYLKIT_STATUS_OK = 0,
  CYLKIT_STATUS_INPUT_ERROR = 1,
  CYLKIT_STATUS_NO_CONVERGENCE = 2,
  CYLKIT_STATUS_RANK_DEFICIENT = 3,
  CYLKIT_STATUS_DUPLICATE_POINTS = 4,
  CYLKIT_STATUS_NULL_POINTER = 5,
  CYLKIT_STATUS_INDEX_OUT_OF_RANGE = 6,
  CYLKIT_STATUS_PANIC = 7,
} CylkitStatus;

typedef enum CylkitVerdict {
  CYLKIT_VERDICT_SOLUTIONS = 0,
  CYLKIT_VERDICT_NONE_DEFINITE = 1,
  CYLKIT_VERDICT_DEGENERATE_DUPLICATE_POINTS = 2,
} CylkitVerdict;

/*
 Opaque list of cylinders.
 */
typedef struct CylkitCylinderList CylkitCylinderList;

/*
 Opaque, immutable point set.
 */
typedef struct CylkitPointSet CylkitPointSet;

typedef struct CylkitConfig {
  double tol_rel;
  double tol_orth;
  uint32_t max_iter;
  uint32_t n_starts;
  uint64_t seed;
  /*
   Newton step length factor in (0, 1].
   */
  double step_damping;
} CylkitConfig;

typedef struct CylkitCylinder {
  /*
   Unit direction, first nonzero component positive.
   */
  double direction[3];
  /*
   Axis point nearest the centroid of the input.
   */
  double axis_point[3];
  double radius;
  /*
   1 when the cylinder is a strict local minimum of the radius, 0 when
   it is only stationary, -1 when not applicable.
   */
  int32_t local_min;
  /*
   1 for the smallest radius of a list, 0 otherwise, -1 when not applicable.
   */
  int32_t global_min;
} CylkitCylinder;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Library version as a static NUL-terminated string.
 */
const char *cylkit_version(void);

/*
 Message for the last failed call on this thread; empty after a success.
 The pointer stays valid until the next call into the library on this thread.
 */
const char *cylkit_last_error(void);

/*
 Writes the default solver settings to `out`.

 # Safety
 `out` must be null or valid for writes.
 */
enum CylkitStatus cylkit_config_default(struct CylkitConfig *out);

/*
 Copies `n` points given as `3n` interleaved coordinates into a new handle.

 # Safety
 `xyz` must point to `3 * n` readable doubles and `out` must be valid for writes.
 */
enum CylkitStatus cylkit_pointset_new(const double *xyz, size_t n, struct CylkitPointSet **out);

/*
 # Safety
 `ps` must be null or a handle from [`cylkit_pointset_new`] not yet freed.
 */
void cylkit_pointset_free(struct CylkitPointSet *ps);

/*
 Number of points, 0 for a null handle.

 # Safety
 `ps` must be null or a live handle.
 */
size_t cylkit_pointset_len(const struct CylkitPointSet *ps);

/*
 Best-fitting cylinder. `variance` may be null.

 # Safety
 `ps` must be a live handle, `cfg` null or readable, `out` writable,
 `variance` null or writable.
 */
enum CylkitStatus cylkit_fit(const struct CylkitPointSet *ps,
                             const struct CylkitConfig *cfg,
                             struct CylkitCylinder *out,
                             double *variance);

/*
 Stationary circumscribed cylinders of four points, ascending by radius,
 with the local and global minimum flags set.

 # Safety
 `ps` must be a live handle, `cfg` null or readable, `out` writable.
 */
enum CylkitStatus cylkit_circ4(const struct CylkitPointSet *ps,
                               const struct CylkitConfig *cfg,
                               struct CylkitCylinderList **out);

/*
 All cylinders through five points. An empty list comes with the verdict
 explaining it; duplicate points return `DuplicatePoints`.

 # Safety
 `ps` must be a live handle; `out` writable; `verdict` null or writable.
 */
enum CylkitStatus cylkit_circ5(const struct CylkitPointSet *ps,
                               struct CylkitCylinderList **out,
                               enum CylkitVerdict *verdict);

/*
 Smallest enclosing cylinder. The indices of the `*k` support points
 (at most 5) are written to `support`, which may be null.

 # Safety
 `ps` must be a live handle, `cfg` null or readable, `out` writable,
 `support` null or writable for 5 values, `k` null or writable.
 */
enum CylkitStatus cylkit_enclose(const struct CylkitPointSet *ps,
                                 const struct CylkitConfig *cfg,
                                 struct CylkitCylinder *out,
                                 size_t *support,
                                 size_t *k);

/*
 Number of cylinders, 0 for a null handle.

 # Safety
 `list` must be null or a live handle.
 */
size_t cylkit_list_len(const struct CylkitCylinderList *list);

/*
 # Safety
 `list` must be a live handle and `out` writable.
 */
enum CylkitStatus cylkit_list_get(const struct CylkitCylinderList *list,
                                  size_t index,
                                  struct CylkitCylinder *out);

/*
 # Safety
 `list` must be null or a handle returned by this library, not yet freed.
 */
void cylkit_list_free(struct CylkitCylinderList *list);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CYLKIT_H */
