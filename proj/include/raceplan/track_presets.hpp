#pragma once

#include "raceplan/track.hpp"

namespace raceplan {

/// Open straight track along +x.
TrackGeometry make_straight(double length, double width, double ds = 1.0);

/// Closed flat circle, counterclockwise.
TrackGeometry make_flat_circle(double radius, double width, double ds = 1.0);

struct OvalParams {
  double straight_length = 250.0;  // [m], each of the two straights
  double turn_radius = 180.0;      // [m]
  double banking_deg = 20.0;       // max banking in the turns (applied as phi < 0)
  double width = 12.0;             // [m]
  double transition_length = 60.0; // curvature/banking ramp length [m]
  double ds = 1.0;                 // sample spacing [m]
};

/// Closed counterclockwise oval: two banked turns joined by straights, with
/// smooth curvature and banking ramps.
TrackGeometry make_oval_banked(const OvalParams& params = {});

struct ComplexParams {
  double scale = 1.0;        // overall size multiplier
  double width = 11.0;       // [m]
  double elevation = 14.0;   // peak-to-peak z variation scale [m]
  double banking_deg = 8.0;  // max banking [deg]
  double slope_max_deg = 13.0;  // cap on |mu| [deg]
  double ds = 1.0;           // sample spacing [m]
};

/// Closed mixed-curvature 3D course built from a closed Fourier curve, with
/// elevation changes and curvature-proportional banking.
TrackGeometry make_complex_synthetic(const ComplexParams& params = {});

}  // namespace raceplan
