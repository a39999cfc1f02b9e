#Multiplicative weighted Voronoi diagrams under random weights: construction and complexity experiments
