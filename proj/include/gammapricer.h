/* C interface to the gamma-equation American call pricer.
 *
 * All functions return a gp_status; on failure gp_last_error() holds a
 * thread-local message.  Handles are opaque and must be released with the
 * matching *_destroy function.  Handles are immutable after creation and may
 * be shared between threads. */
#ifndef GAMMAPRICER_H
#define GAMMAPRICER_H

#include <stddef.h>

#if defined(_WIN32)
#  if defined(GP_BUILDING)
#    define GP_API __declspec(dllexport)
#  else
#    define GP_API __declspec(dllimport)
#  endif
#else
#  define GP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
    GP_OK = 0,
    GP_ERR_INVALID_ARGUMENT = 1, /* null pointer, size mismatch, bad enum */
    GP_ERR_DOMAIN = 2,           /* parameter outside its admissible set */
    GP_ERR_NUMERIC = 3,          /* quadrature or arithmetic failure */
    GP_ERR_PARABOLICITY = 4,     /* diffusion coefficient lost positivity */
    GP_ERR_CONVERGENCE = 5,      /* PSOR exhausted its sweep budget */
    GP_ERR_INTERNAL = 6
} gp_status;

typedef enum { GP_SIDE_BID = 0, GP_SIDE_ASK = 1 } gp_side;
typedef enum { GP_COST_CONSTANT = 0, GP_COST_LINEAR = 1, GP_COST_PIECEWISE_LINEAR = 2 } gp_cost_kind;
typedef enum { GP_SWEEP_FACTORED = 0, GP_SWEEP_TRANSFORMED = 1 } gp_sweep;

typedef struct {
    double sigma;      /* historical volatility */
    double r;          /* risk-free rate */
    double q;          /* dividend yield */
    double strike;
    double maturity;   /* years */
    double dt_rehedge; /* years between portfolio rearrangements */
} gp_market;

typedef struct {
    gp_cost_kind kind;
    double c0;
    double kappa;    /* ignored for GP_COST_CONSTANT */
    double xi_minus; /* piecewise-linear only */
    double xi_plus;  /* piecewise-linear only */
} gp_cost;

typedef struct {
    double L;        /* log-moneyness truncation */
    int n;           /* half node count, h = L/n */
    int m;           /* time steps, k = maturity/m */
    double tau_star; /* Dirac smoothing horizon */
} gp_grid;

typedef struct {
    double omega;
    double tol;
    int k_max;
    gp_sweep sweep;
} gp_psor;

typedef struct {
    double initial_mass;
    double max_mass;
    double max_residual;
    double min_obstacle_gap;
    long total_sweeps;
    int noncontiguous_levels;
} gp_diagnostics;

typedef struct gp_model gp_model;
typedef struct gp_result gp_result;

GP_API const char* gp_version(void);
GP_API const char* gp_status_string(gp_status s);
GP_API const char* gp_last_error(void);

GP_API void gp_market_default(gp_market* out);
GP_API void gp_psor_default(gp_psor* out);

/* transaction costs */
GP_API gp_status gp_cost_value(const gp_cost* c, double xi, double* out);
GP_API gp_status gp_cost_mean_value(const gp_cost* c, double xi, double* out);
GP_API gp_status gp_cost_mean_value_quadrature(const gp_cost* c, double xi, double* out);
GP_API gp_status gp_cost_floor(const gp_cost* c, double* out, int* negative_flag);

/* volatility models */
GP_API gp_status gp_model_create(const gp_market* mk, const gp_cost* c, gp_side side, gp_model** out);
GP_API gp_status gp_model_create_constant(const gp_market* mk, double sigma, gp_model** out);
GP_API void gp_model_destroy(gp_model* m);
GP_API gp_status gp_model_sigma_hat_sq(const gp_model* m, double H, double* out);
GP_API gp_status gp_model_beta(const gp_model* m, double H, double* out);
GP_API gp_status gp_model_beta_prime(const gp_model* m, double H, double* out);
/* *pass = 1 when sigma_hat^2 and beta' are positive on [h_lo, h_hi]; a failed
 * check still returns GP_OK. */
GP_API gp_status gp_model_parabolicity(const gp_model* m, double h_lo, double h_hi, int* pass,
                                       double* min_sigma_hat_sq, double* min_beta_prime);
GP_API gp_status gp_sigma_bounds(const gp_model* m, gp_side side, double* sigma_min, double* sigma_max);

/* gamma-equation solver */
GP_API gp_status gp_initial_mass(const gp_grid* g, const gp_market* mk, double* out);
GP_API gp_status gp_price_american(const gp_model* m, const gp_grid* g, const gp_psor* cfg,
                                   const double* S, size_t count, gp_result** out);
GP_API gp_status gp_price_european(const gp_model* m, const gp_grid* g, const gp_psor* cfg,
                                   const double* S, size_t count, gp_result** out);
GP_API void gp_result_destroy(gp_result* r);
GP_API size_t gp_result_count(const gp_result* r);
GP_API size_t gp_result_levels(const gp_result* r);
GP_API gp_status gp_result_prices(const gp_result* r, double* V, size_t cap);
/* prices at time level j (tau_j = j k), j = 0..levels-1 */
GP_API gp_status gp_result_surface(const gp_result* r, size_t level, double* V, size_t cap);
/* tau_j and S_f(tau_j); S_f is +inf where no node is in the exercise region */
GP_API gp_status gp_result_boundary(const gp_result* r, double* tau, double* S_f, size_t cap);
GP_API gp_status gp_result_diagnostics(const gp_result* r, gp_diagnostics* out);
GP_API gp_status gp_result_step_residuals(const gp_result* r, double* res, size_t cap);

/* oracles */
GP_API gp_status gp_crr_price(const gp_market* mk, double sigma, int steps, int american, double S0,
                              double* out);
/* writes min(cap, steps) points; *count receives steps */
GP_API gp_status gp_crr_boundary(const gp_market* mk, double sigma, int steps, double* t, double* S_f,
                                 size_t cap, size_t* count);
GP_API gp_status gp_bs_call(const gp_market* mk, double sigma, double S, double t_to_expiry, double* out);

/* small dense LCPs: x >= g, M x - d >= 0, complementary; M is row-major n x n.
 * gp_lcp_psor reads x as the warm start and overwrites it with the solution. */
GP_API gp_status gp_lcp_psor(const double* M, size_t n, const double* d, const double* g,
                             const gp_psor* cfg, double* x, int* sweeps);
GP_API gp_status gp_lcp_enumerate(const double* M, size_t n, const double* d, const double* g,
                                  double* x, int* found);

#ifdef __cplusplus
}
#endif

#endif
