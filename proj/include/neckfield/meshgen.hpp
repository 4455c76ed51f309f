#pragma once

#include <cstddef>
#include <vector>

#include "neckfield/geometry.hpp"
#include "neckfield/mesh.hpp"

namespace neckfield {

struct GradingPolicy {
  double theta = 0.25;       // neck element size as a fraction of the local gap
  double h_max = 0.5;        // far-field size
  double band = 0.0;         // neck band half-width; 0 selects 2R
  double h_boundary = 0.05;  // size on inclusion boundaries outside the band
  double grade = 0.25;       // growth rate of the sizing field away from fine regions
  std::size_t max_elements = 2'000'000;

  void validate() const;
  double band_for(const NeckProfile& profile) const { return band > 0.0 ? band : 2.0 * profile.R; }
};

/// Target circumdiameter at p for the pair domain.
double mesh_size(const DomainSpec& domain, const NeckProfile& profile, const GradingPolicy& policy,
                 Vec2 p);

/// Rough element count the policy would produce, used by the refusal guard.
std::size_t estimate_elements(const DomainSpec& domain, const NeckProfile& profile,
                              const GradingPolicy& policy);

/// Graded conforming triangulation of the region between the outer circle and
/// the two inclusions (the right meridian half in axisymmetric mode).
Mesh build_mesh(const DomainSpec& domain, const NeckProfile& profile, const GradingPolicy& policy);

/// Upper unit half-disk {|x| < radius, y > 0}: Flat tag on y=0, Outer tag on the arc.
Mesh build_halfdisk_mesh(double radius, double h);

/// Exact area of the meshed region (meridian area in axisymmetric mode).
double domain_area(const DomainSpec& domain);

struct MeshQuality {
  double min_angle_deg = 0.0;
  double max_angle_deg = 0.0;
  double max_aspect = 0.0;  // circumradius over twice the inradius (1 for equilateral)
  double total_area = 0.0;
  int boundary_loops = 0;
  bool min_angle_ok = false;  // min angle >= 20 degrees
  // circumdiameter / gap for elements whose centroid lies in the neck band
  std::vector<double> histogram_edges;
  std::vector<std::size_t> neck_histogram;
  double max_neck_ratio = 0.0;
};

MeshQuality mesh_quality(const Mesh& mesh);
MeshQuality mesh_quality(const Mesh& mesh, const NeckProfile& profile, double band);

/// Number of elements met by the vertical segment at x'=xp between the two
/// inclusion graphs.
int neck_crossing_count(const Mesh& mesh, const NeckProfile& profile, double xp);

double circumradius(Vec2 a, Vec2 b, Vec2 c);

}  // namespace neckfield
