# Tests package for networks app
