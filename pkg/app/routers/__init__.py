# API Routers

