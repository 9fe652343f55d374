/* radonlab C API.
 *
 * Objects are opaque handles released with the matching *_free call.
 * Every function returning rl_status leaves a one-line message retrievable
 * with rl_last_error() (per thread) when the status is not RL_OK.
 * Strings returned through char** are owned by the caller and released with
 * rl_string_free().
 *
 * Operations take their parameters as an array of "key=value" strings; an
 * unknown key is an argument error.
 */
#ifndef RADONLAB_H
#define RADONLAB_H

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define RL_API __declspec(dllexport)
#else
#define RL_API __attribute__((visibility("default")))
#endif

typedef enum rl_status {
  RL_OK = 0,
  RL_ERR_INTERNAL = 1,
  RL_ERR_ARGUMENT = 2,
  RL_ERR_IO = 3,
  RL_ERR_NUMERICAL = 4
} rl_status;

typedef struct rl_grid rl_grid;
typedef struct rl_sino rl_sino;

RL_API const char* rl_version(void);
RL_API const char* rl_last_error(void);
RL_API void rl_string_free(char* s);

/* Worker threads for the numerical kernels (n >= 1). */
RL_API rl_status rl_set_threads(int n);

/* Image grids: n x n cells over [-half_extent, half_extent]^2, row-major,
 * row 0 at the smallest y. */
RL_API rl_status rl_grid_create(int n, double half_extent, rl_grid** out);
RL_API void rl_grid_free(rl_grid* g);
RL_API int rl_grid_n(const rl_grid* g);
RL_API double rl_grid_half_extent(const rl_grid* g);
RL_API double* rl_grid_data(rl_grid* g);
RL_API rl_status rl_grid_read(const char* path, rl_grid** out);
RL_API rl_status rl_grid_write(const rl_grid* g, const char* path);
/* lo == hi maps the grid's own range. */
RL_API rl_status rl_grid_write_pgm(const rl_grid* g, const char* path, double lo, double hi);

/* Sinograms: m angles j pi / m times p_count offsets over
 * [-p_half_extent, p_half_extent]. */
RL_API void rl_sino_free(rl_sino* s);
RL_API int rl_sino_m(const rl_sino* s);
RL_API int rl_sino_p_count(const rl_sino* s);
RL_API double rl_sino_p_half_extent(const rl_sino* s);
RL_API double* rl_sino_data(rl_sino* s);
RL_API rl_status rl_sino_read(const char* path, rl_sino** out);
RL_API rl_status rl_sino_write(const rl_sino* s, const char* path);

/* Phantom keys: kind (coherent|flat_edge|convex_edge|corner|disk), center=x,y,
 * xi0=x,y, h, lambda, a, angle (degrees), offset, rloc, radius, taper,
 * amplitude. */

/* Renders a phantom. Keys: phantom keys, n, L. */
RL_API rl_status rl_phantom(const char* const* kv, int count, rl_grid** out);

/* Analytic sinogram of a phantom. Keys: phantom keys, m, pcount, R. */
RL_API rl_status rl_sinogram_phantom(const char* const* kv, int count, rl_sino** out);

/* Sinogram of an image by ray quadrature. Keys: m, pcount, R, interp
 * (linear|cubic). */
RL_API rl_status rl_sinogram_grid(const rl_grid* img, const char* const* kv, int count, rl_sino** out);

/* Ramp-filtered sinogram. Keys: mode (linear|periodic). */
RL_API rl_status rl_filter(const rl_sino* s, const char* const* kv, int count, rl_sino** out);

/* Filtered backprojection. Keys: method (direct|interp), kernel
 * (dirac|sinc|lan3|lan3x2), upsample, refocus=x,y, psi, n, L. */
RL_API rl_status rl_recon(const rl_sino* s, const char* const* kv, int count, rl_grid** out);

/* Fourier multiplier reconstruction from the image f_psi. Keys: m, kmax,
 * psi (applied to f first when given). */
RL_API rl_status rl_recon_multiplier(const rl_grid* f, const char* const* kv, int count, rl_grid** out);

RL_API rl_status rl_compare(const rl_grid* a, const rl_grid* b, double* l2_rel, double* linf_rel);

/* Predicted artifact table "k,x,y,xi1,xi2,inside". Keys: phantom keys, m,
 * window, B (edges), kmax, dedup. */
RL_API rl_status rl_predict(const char* const* kv, int count, char** table);

/* Matches peaks of |recon - reference| against the prediction. Keys:
 * prediction keys plus threshold, match_cells, envelope=x,y, exclude. */
RL_API rl_status rl_verify(const rl_grid* recon, const rl_grid* reference, const char* const* kv, int count,
                           char** report, int* all_matched);

/* Singularity fit on a crosscut. Keys: kind (pv|inv_sqrt|log), axis
 * (row|column), pos, p0, window, core, refine, sigma. Report is
 * "kind,c,p0,residual,window" with a header; *accepted is 0 when the
 * residual exceeds the rejection threshold. */
RL_API rl_status rl_fit(const rl_grid* img, const char* const* kv, int count, char** report, int* accepted);

/* Crosscut as "coord,value" CSV. Keys: axis (row|column|line), pos,
 * origin=x,y, angle (degrees). */
RL_API rl_status rl_crosscut(const rl_grid* img, const char* const* kv, int count, char** csv);

/* Runs an experiment config; report holds the pass/fail summary. */
RL_API rl_status rl_run_config(const char* path, const char* out_dir, char** report, int* all_pass);

#ifdef __cplusplus
}
#endif

#endif
