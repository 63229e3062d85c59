"""
Run the analysis API server. Set RELOAD=1 while developing.
"""
import os

import uvicorn
from app.config import settings

if __name__ == "__main__":
    uvicorn.run(
        "app.main:app",
        host=settings.api_host,
        port=settings.api_port,
        log_level=settings.log_level.lower(),
        reload=os.getenv("RELOAD") == "1"
    )
