# Capacity formulas and region geometry
