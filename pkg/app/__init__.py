# Timed specification theory package
