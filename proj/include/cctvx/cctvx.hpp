#pragma once

#include <cctvx/cameras.hpp>
#include <cctvx/errors.hpp>
#include <cctvx/exposure.hpp>
#include <cctvx/fixtures.hpp>
#include <cctvx/geo.hpp>
#include <cctvx/gpx.hpp>
#include <cctvx/grid_index.hpp>
#include <cctvx/pipeline.hpp>
#include <cctvx/report.hpp>
#include <cctvx/xml.hpp>
