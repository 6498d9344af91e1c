from datetime import datetime

__version__ = "0.3.0"
__current_year__ = datetime.now().year
