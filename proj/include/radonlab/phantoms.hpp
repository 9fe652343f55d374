#pragma once

#include "radonlab/grid.hpp"

#include <string>

namespace radonlab {

enum class PhantomKind { coherent, flat_edge, convex_edge, corner, disk };

PhantomKind parse_phantom_kind(const std::string& s);
const char* to_string(PhantomKind k);

/// Analytic test function. Edges and corners are written in a frame rotated
/// by `angle` about `center` and multiplied by the localization taper
/// h_mu(r_loc - |x - center|), mu = taper_sharpness / r_loc.
struct PhantomSpec {
  PhantomKind kind = PhantomKind::coherent;
  Vec2 center{};
  Vec2 xi0{0.0, 1.0}; // coherent only; physical frequency is xi0 / h
  double h = 1.0;
  double lambda = 64.0;
  double a = 1.5;      // convex edge: u1 = a * u2^2
  double angle = 0.0;  // edge frame rotation
  double offset = 0.0; // flat edge: u1 = offset
  double rloc = 0.5;
  double radius = 0.3; // disk
  double taper_sharpness = 10.0;
  double amplitude = 1.0;
};

void validate(const PhantomSpec& spec);

/// h_lambda(t) = (1 + erf(lambda t)) / 2.
double smooth_step(double lambda, double t);

double evaluate(const PhantomSpec& spec, Vec2 x);

/// Radius of a ball about the origin outside which |f| < 1e-12.
double support_radius(const PhantomSpec& spec);

/// Local radius of a ball about spec.center containing the support.
double local_support_radius(const PhantomSpec& spec);

ImageGrid render(const PhantomSpec& spec, int n, double half_extent);

ImageGrid coherent_state(const PhantomSpec& spec, int n, double half_extent);
ImageGrid edge_phantom(const PhantomSpec& spec, int n, double half_extent);
ImageGrid disk_phantom(Vec2 center, double radius, double lambda, int n, double half_extent);

} // namespace radonlab
