#pragma once

#define PNET_VERSION "0.1.0"
