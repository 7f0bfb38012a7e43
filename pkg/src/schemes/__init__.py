# Coding schemes
