#pragma once

#include "nbbook/annotations.hpp"
#include "nbbook/call_extraction.hpp"
#include "nbbook/catalog.hpp"
#include "nbbook/category.hpp"
#include "nbbook/encoding.hpp"
#include "nbbook/error.hpp"
#include "nbbook/exporter.hpp"
#include "nbbook/notebook.hpp"
#include "nbbook/overlay.hpp"
#include "nbbook/patterns.hpp"
#include "nbbook/pipeline.hpp"
