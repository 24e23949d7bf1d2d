#ifndef QEI_H
#define QEI_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QeiCovectorClass {
  QEI_COVECTOR_CLASS_HYPERBOLIC_FUTURE = 0,
  QEI_COVECTOR_CLASS_HYPERBOLIC_PAST = 1,
  QEI_COVECTOR_CLASS_ORDINARY_NULL = 2,
  QEI_COVECTOR_CLASS_EXTRAORDINARY_NULL = 3,
  QEI_COVECTOR_CLASS_DOUBLY_NULL = 4,
  QEI_COVECTOR_CLASS_INTERSTITIAL = 5,
  QEI_COVECTOR_CLASS_SPACELIKE = 6,
} QeiCovectorClass;

typedef enum QeiNormKind {
  /**
   * ℵ = 1
   */
  QEI_NORM_KIND_SR = 0,
  /**
   * ℵ = ℵ_UC
   */
  QEI_NORM_KIND_UC = 1,
  /**
   * ℵ supplied by the caller
   */
  QEI_NORM_KIND_EXPLICIT = 2,
} QeiNormKind;

typedef enum QeiStatus {
  QEI_STATUS_OK = 0,
  QEI_STATUS_NULL_POINTER = 1,
  QEI_STATUS_INVALID_INPUT = 2,
  QEI_STATUS_DEGENERATE = 3,
  QEI_STATUS_NOT_SUBLUMINAL = 4,
  QEI_STATUS_NOT_CONVERGED = 5,
  QEI_STATUS_NOT_POSITIVE = 6,
  QEI_STATUS_PANIC = 7,
} QeiStatus;

typedef enum QeiVectorClass {
  QEI_VECTOR_CLASS_SUBLUMINAL_FUTURE = 0,
  QEI_VECTOR_CLASS_SUBLUMINAL_PAST = 1,
  QEI_VECTOR_CLASS_INTERLUMINAL_FUTURE = 2,
  QEI_VECTOR_CLASS_INTERLUMINAL_PAST = 3,
  QEI_VECTOR_CLASS_SLOW_NULL = 4,
  QEI_VECTOR_CLASS_FAST_NULL = 5,
  QEI_VECTOR_CLASS_SUPERLUMINAL = 6,
} QeiVectorClass;

/**
 * Uniaxial crystal with parameter ξ.
 */
typedef struct QeiMedium QeiMedium;

/**
 * Inertial worldline `(cosh α, sinh α cos β, 0, sinh α sin β)` in a medium.
 */
typedef struct QeiObserver QeiObserver;

typedef struct QeiSwec {
  bool holds;
  bool boundary;
  double min_eig_x1;
  double min_eig_x2;
} QeiSwec;

typedef struct QeiBound {
  double c;
  double aleph;
  double gpp_norm_sq;
  double bound;
} QeiBound;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the calling thread's last error message (NUL-terminated, possibly
 * truncated) into `buf`. Returns the buffer size needed for the full message.
 *
 * # Safety
 * `buf` must be null or valid for `len` bytes.
 */
size_t qei_last_error(char *buf, size_t len);

/**
 * Static NUL-terminated version string.
 */
const char *qei_version(void);

/**
 * # Safety
 * `out` must be a valid pointer; release the handle with [`qei_medium_free`].
 */
enum QeiStatus qei_medium_new(double xi, struct QeiMedium **out);

/**
 * # Safety
 * `m` must be null or a handle from [`qei_medium_new`] not yet freed.
 */
void qei_medium_free(struct QeiMedium *m);

/**
 * # Safety
 * `m` must be a live medium handle and `out` a valid pointer.
 */
enum QeiStatus qei_medium_xi(const struct QeiMedium *m, double *out);

/**
 * Creates an observer in medium `m`; fails with `NotSubluminal` off the
 * subluminal set.
 *
 * # Safety
 * `m` must be a live medium handle and `out` a valid pointer; release the
 * handle with [`qei_observer_free`].
 */
enum QeiStatus qei_observer_new(const struct QeiMedium *m,
                                double alpha,
                                double beta,
                                struct QeiObserver **out);

/**
 * # Safety
 * `o` must be null or a handle from [`qei_observer_new`] not yet freed.
 */
void qei_observer_free(struct QeiObserver *o);

/**
 * Evaluates the Fresnel polynomial at covector `k[4]`.
 *
 * # Safety
 * `m` must be a live handle, `k` valid for 4 reads, `out` a valid pointer.
 */
enum QeiStatus qei_fresnel(const struct QeiMedium *m, const double *k, double *out);

/**
 * # Safety
 * `m` must be a live handle, `z` valid for 4 reads, `out` a valid pointer.
 */
enum QeiStatus qei_classify_vector(const struct QeiMedium *m,
                                   const double *z,
                                   double tol,
                                   enum QeiVectorClass *out);

/**
 * # Safety
 * `m` must be a live handle, `k` valid for 4 reads, `out` a valid pointer.
 */
enum QeiStatus qei_classify_covector(const struct QeiMedium *m,
                                     const double *k,
                                     double tol,
                                     enum QeiCovectorClass *out);

/**
 * Energy-condition verdict along the observer's worldline.
 *
 * # Safety
 * `o` must be a live handle and `out` a valid pointer.
 */
enum QeiStatus qei_swec(const struct QeiObserver *o, struct QeiSwec *out);

/**
 * # Safety
 * `o` must be a live handle and `out` a valid pointer.
 */
enum QeiStatus qei_c_coefficient(const struct QeiObserver *o, double *out);

/**
 * ℵ_UC by Newton inversion (`series == false`) or the small-ξ series.
 *
 * # Safety
 * `o` must be a live handle and `out` a valid pointer.
 */
enum QeiStatus qei_aleph_uc(const struct QeiObserver *o, bool series, double *out);

/**
 * QEI bound for the Gaussian `g(τ) = exp(−τ²/(2σ²))`. `aleph` is read only
 * for `QeiNormKind::Explicit`.
 *
 * # Safety
 * `o` must be a live handle and `out` a valid pointer.
 */
enum QeiStatus qei_bound_gaussian(const struct QeiObserver *o,
                                  enum QeiNormKind kind,
                                  double aleph,
                                  double sigma,
                                  struct QeiBound *out);

/**
 * QEI bound for `g` sampled on the uniform grid `t0 + j·h`, `j < len`.
 *
 * # Safety
 * `o` must be a live handle, `samples` valid for `len` reads, `out` a valid
 * pointer.
 */
enum QeiStatus qei_bound_sampled(const struct QeiObserver *o,
                                 enum QeiNormKind kind,
                                 double aleph,
                                 double h,
                                 double t0,
                                 const double *samples,
                                 size_t len,
                                 struct QeiBound *out);

/**
 * Classical energy density at the origin for the single-mode wave packet of
 * width `tau0` moving along the observer's worldline (closed form).
 *
 * # Safety
 * `m` must be a live handle and `out` a valid pointer.
 */
enum QeiStatus qei_rho_origin(const struct QeiMedium *m,
                              double tau0,
                              double alpha,
                              double beta,
                              double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QEI_H */
